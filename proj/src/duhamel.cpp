#include "kdv5/duhamel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fft.hpp"
#include "kdv5/quadrature.hpp"

namespace kdv5 {

namespace {

constexpr cplx kI(0.0, 1.0);
// Largest resonance phase (rad) one Gauss-Legendre panel has to resolve.
constexpr double kPanelPhase = 8.0;

double pow5(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}

// sinh(w)/w, with the series near 0.
cplx sinhc(cplx w) {
  if (std::abs(w) < 1e-4) {
    const cplx w2 = w * w;
    return 1.0 + w2 / 6.0 + w2 * w2 / 120.0;
  }
  return std::sinh(w) / w;
}

// Zero-padded transforms of f, xi f, xi^2 f.
std::array<std::vector<cplx>, 3> padded_derivatives(const SpectralField& f, int padded) {
  std::array<std::vector<cplx>, 3> out;
  for (auto& v : out) v.assign(static_cast<std::size_t>(padded), cplx(0.0));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double xi = f.grid.xi(i);
    out[0][i] = f.values[i];
    out[1][i] = xi * f.values[i];
    out[2][i] = xi * xi * f.values[i];
  }
  for (auto& v : out) detail::fft_inplace(v, -1);
  return out;
}

// Symmetric bilinear form B(v, w)^ = (i xi / 2pi) int beta(xi1, xi2) v^ w^,
// with B(u, u) = -(c2 (u_x^2)_x + c3 (u u_xx)_x)^. One padded pass; output half extent 2M.
SpectralField bilinear(const SpectralField& v, const SpectralField& w, const Coefficients& c) {
  if (!(v.grid == w.grid)) throw InvalidInput("bilinear: grid mismatch");
  const int m = v.grid.half_extent();
  const std::size_t n_out = 2 * v.values.size() - 1;
  const int padded = detail::next_fast_size(static_cast<int>(n_out));
  const auto fv = padded_derivatives(v, padded);
  std::array<std::vector<cplx>, 3> fw_own;
  if (&v != &w) fw_own = padded_derivatives(w, padded);
  const auto& fw = &v == &w ? fv : fw_own;
  std::vector<cplx> acc(static_cast<std::size_t>(padded));
  for (std::size_t i = 0; i < acc.size(); ++i) {
    acc[i] = c.c2 * fv[1][i] * fw[1][i] + 0.5 * c.c3 * (fv[2][i] * fw[0][i] + fv[0][i] * fw[2][i]);
  }
  detail::fft_inplace(acc, +1);
  SpectralField out(FrequencyGrid(v.grid.delta(), 2 * m), v.hermitian && w.hermitian);
  const double scale = v.grid.delta() / padded;
  for (std::size_t i = 0; i < n_out; ++i) {
    out.values[i] = kI * out.grid.xi(i) / (2.0 * kPi) * acc[i] * scale;
  }
  return out;
}

// -c1 (u^3)_x on half extent 3M.
SpectralField cubic_term(const SpectralField& u, double c1) {
  const int m = u.grid.half_extent();
  const auto sq = convolve_spectra(u, u);
  auto cube = resize_field(convolve_spectra(sq, resize_field(u, 2 * m)), 3 * m);
  for (std::size_t i = 0; i < cube.values.size(); ++i) {
    const double xi = cube.grid.xi(i);
    cube.values[i] *= -c1 * kI * xi / (4.0 * kPi * kPi);
  }
  return cube;
}

void accumulate(SpectralField& acc, const SpectralField& term, cplx w) {
  for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += w * term.values[i];
}

// acc += w U(s) term, without materializing U(s) term.
void accumulate_propagated(SpectralField& acc, const SpectralField& term, double s, double w) {
  for (std::size_t i = 0; i < acc.values.size(); ++i) {
    if (term.values[i] == cplx(0.0)) continue;
    const double xi = term.grid.xi(i);
    acc.values[i] += w * std::polar(1.0, s * pow5(xi)) * term.values[i];
  }
}

// Indices of entries with |u| above rel * max.
std::vector<std::size_t> significant(const SpectralField& f, double rel) {
  const double cut = rel * f.max_abs();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (std::abs(f.values[i]) > cut) idx.push_back(i);
  }
  return idx;
}

// Largest |q1| over pairs whose amplitude product is non-negligible.
double pair_phase_bound(const SpectralField& u0) {
  const auto idx = significant(u0, 0.0);
  const double cut = 1e-12 * u0.max_abs() * u0.max_abs();
  double qmax = 0.0;
  for (std::size_t i : idx) {
    for (std::size_t j : idx) {
      if (std::abs(u0.values[i] * u0.values[j]) <= cut) continue;
      qmax = std::max(qmax, std::abs(resonance_q1(u0.grid.xi(i), u0.grid.xi(j))));
    }
  }
  return qmax;
}

int panel_count(double phase) {
  return std::max(1, static_cast<int>(std::ceil(phase / kPanelPhase)));
}

struct SortedRule {
  std::vector<double> s;
  std::vector<double> w;
};

SortedRule sorted_rule(double lo, double hi, int panels, int n) {
  const auto r = composite_gauss(lo, hi, panels, n);
  std::vector<std::size_t> order(r.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return r.nodes[a] < r.nodes[b]; });
  SortedRule out;
  for (auto k : order) {
    out.s.push_back(r.nodes[k]);
    out.w.push_back(r.weights[k]);
  }
  return out;
}

}  // namespace

Coefficients::Coefficients(double c1_, double c2_, double c3_) : c1(c1_), c2(c2_), c3(c3_) {
  if (c3 == 0.0) throw InvalidInput("Coefficients: c3 must be nonzero");
}

Coefficients Coefficients::unchecked(double c1, double c2, double c3) {
  Coefficients c;
  c.c1 = c1;
  c.c2 = c2;
  c.c3 = c3;
  return c;
}

Coefficients Coefficients::lax(double alpha) {
  return Coefficients(-0.4 * alpha * alpha, alpha, 2.0 * alpha);
}

Coefficients Coefficients::lax_linear_c1(double alpha) {
  return Coefficients(-0.4 * alpha, alpha, 2.0 * alpha);
}

double resonance_q1(double xi1, double xi2) {
  const double xi = xi1 + xi2;
  return 2.5 * xi * xi1 * xi2 * (xi * xi + xi1 * xi1 + xi2 * xi2);
}

double resonance_q2(double xi1, double xi2, double xi3) {
  const double a = xi1 + xi2;
  const double b = xi2 + xi3;
  const double c = xi3 + xi1;
  return 2.5 * a * b * c * (a * a + b * b + c * c);
}

cplx exp_dd(cplx a, cplx b) { return std::exp(0.5 * (a + b)) * sinhc(0.5 * (a - b)); }

cplx exp_dd(cplx a, cplx b, cplx c) {
  const double dab = std::abs(a - b);
  const double dbc = std::abs(b - c);
  const double dac = std::abs(a - c);
  const double spread = std::max({dab, dbc, dac});
  if (spread < 1e-2) {
    // e^m sum_{n>=2} h_{n-2}(da, db, dc) / n! about the centroid m.
    const cplx m = (a + b + c) / 3.0;
    const cplx d[3] = {a - m, b - m, c - m};
    // Complete homogeneous polynomials h_k of the offsets, one variable at a time.
    constexpr int kTerms = 12;
    cplx h[kTerms] = {};
    h[0] = 1.0;
    for (const cplx& x : d) {
      for (int k = 1; k < kTerms; ++k) h[k] += x * h[k - 1];
    }
    cplx sum = 0.0;
    double fact = 2.0;
    for (int n = 2; n < kTerms + 2; ++n) {
      sum += h[n - 2] / fact;
      fact *= n + 1;
    }
    return std::exp(m) * sum;
  }
  // Divide by the widest gap; the middle node enters both first differences.
  cplx x0 = a, x1 = b, x2 = c;
  if (dab >= dbc && dab >= dac) {
    x0 = a; x1 = c; x2 = b;
  } else if (dbc >= dab && dbc >= dac) {
    x0 = b; x1 = a; x2 = c;
  }
  return (exp_dd(x1, x2) - exp_dd(x0, x1)) / (x2 - x0);
}

cplx phi_factor(double q, double t) { return kI * t * exp_dd(cplx(0.0, -q * t), 0.0); }

cplx exp_integral(double q, double t) { return t * exp_dd(cplx(0.0, -q * t), 0.0); }

cplx pairing_factor(double p, double Q, double t) {
  return t * t * exp_dd(0.0, cplx(0.0, -t * p), cplx(0.0, -t * Q));
}

cplx a2_kernel(double xi1, double xi2, double t, const Coefficients& c) {
  const double xi = xi1 + xi2;
  return xi * c.beta(xi1, xi2) * phi_factor(resonance_q1(xi1, xi2), t) / (2.0 * kPi);
}

cplx a3_kernel(double xi1, double xi2, double xi3, double t, const Coefficients& c,
               bool with_c1, bool with_pairing) {
  const double eta = xi2 + xi3;
  const double xi = xi1 + eta;
  // Factored forms avoid cancellation between large fifth powers.
  const double Q = resonance_q2(xi1, xi2, xi3);
  cplx k = 0.0;
  if (with_c1) k += -c.c1 * kI * xi * exp_integral(Q, t);
  if (with_pairing) {
    const double p = resonance_q1(xi1, eta);
    k += -2.0 * xi * eta * c.beta(xi1, eta) * c.beta(xi2, xi3) * pairing_factor(p, Q, t);
  }
  return k / (4.0 * kPi * kPi);
}

TripleSums TripleSums::from(double xi1, double xi2, double xi3) {
  return {xi1 + xi2 + xi3, xi1, xi2, xi3, xi2 + xi3, xi1 + xi2, xi3 + xi1};
}

cplx a2_kernel_sums(double xi, double xi1, double xi2, double t, const Coefficients& c) {
  const double q = 2.5 * xi * xi1 * xi2 * (xi * xi + xi1 * xi1 + xi2 * xi2);
  return xi * c.beta(xi1, xi2) * phi_factor(q, t) / (2.0 * kPi);
}

cplx a3_kernel_averaged(const TripleSums& z, double t, const Coefficients& c, double p_cut,
                        double q_cut) {
  const double Q = 2.5 * z.s12 * z.eta * z.s31 * (z.s12 * z.s12 + z.eta * z.eta + z.s31 * z.s31);
  const double p = 2.5 * z.xi * z.xi1 * z.eta * (z.xi * z.xi + z.xi1 * z.xi1 + z.eta * z.eta);
  const cplx b(0.0, -t * p), cq(0.0, -t * Q);
  // f(w) = (e^w - 1)/w, or its non-rotating part -1/w.
  auto f = [](cplx w, bool drop) { return drop ? -1.0 / w : exp_dd(w, 0.0); };
  const bool drop_q = std::abs(cq) > q_cut;
  cplx k = -c.c1 * kI * z.xi * t * f(cq, drop_q);
  if (c.c2 != 0.0 || c.c3 != 0.0) {
    const double gap = std::abs(cq - b);
    const bool db = std::abs(b) > p_cut && gap > 0.5 * p_cut;
    const bool dc = drop_q && gap > 0.5 * p_cut;
    const cplx j = (db || dc) ? t * t * (f(cq, dc) - f(b, db)) / (cq - b)
                              : t * t * exp_dd(0.0, b, cq);
    k += -2.0 * z.xi * z.eta * c.beta(z.xi1, z.eta) * c.beta(z.xi2, z.xi3) * j;
  }
  return k / (4.0 * kPi * kPi);
}

cplx a3_kernel_averaged(double xi1, double xi2, double xi3, double t, const Coefficients& c,
                        double p_cut, double q_cut) {
  return a3_kernel_averaged(TripleSums::from(xi1, xi2, xi3), t, c, p_cut, q_cut);
}

double support_radius(const SpectralField& f) {
  double r = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] != cplx(0.0)) r = std::max(r, std::abs(f.grid.xi(i)));
  }
  return r;
}

SpectralField resize_field(const SpectralField& f, int half_extent) {
  SpectralField out(FrequencyGrid(f.grid.delta(), half_extent), f.hermitian);
  const int m_in = f.grid.half_extent();
  const int m = std::min(m_in, half_extent);
  for (int k = -m; k <= m; ++k) out.values[out.grid.index_of_mode(k)] = f.values[f.grid.index_of_mode(k)];
  return out;
}

double relative_l2_difference(const SpectralField& f, const SpectralField& g) {
  const int m = std::max(f.grid.half_extent(), g.grid.half_extent());
  const auto a = resize_field(f, m);
  const auto b = resize_field(g, m);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

SpectralField a2_spectral(const SpectralField& u0, double t, const Coefficients& c, double tol) {
  const int m = u0.grid.half_extent();
  const double d = u0.grid.delta();
  SpectralField out(FrequencyGrid(d, 2 * m), u0.hermitian);
  if (t == 0.0) return out;
  const auto idx = significant(u0, 0.0);
  std::vector<cplx> even(out.values.size()), odd(out.values.size());
  for (std::size_t i : idx) {
    const int m1 = static_cast<int>(i) - m;
    const double xi1 = u0.grid.xi(i);
    for (std::size_t j : idx) {
      const int m2 = static_cast<int>(j) - m;
      const std::size_t o = out.grid.index_of_mode(m1 + m2);
      const cplx term = a2_kernel(xi1, u0.grid.xi(j), t, c) * u0.values[i] * u0.values[j];
      (m1 % 2 == 0 ? even : odd)[o] += term;
    }
  }
  double diff = 0.0, norm = 0.0;
  for (std::size_t o = 0; o < out.values.size(); ++o) {
    const double xi = out.grid.xi(o);
    const cplx total = d * (even[o] + odd[o]);
    diff += std::norm(2.0 * d * (even[o] - odd[o]));
    norm += std::norm(total);
    out.values[o] = std::polar(1.0, t * pow5(xi)) * total;
  }
  if (norm > 0.0 && std::sqrt(diff / norm) > tol) {
    char msg[120];
    std::snprintf(msg, sizeof msg, "a2_spectral: xi1 quadrature unresolved (stride-2 rules differ by %.2e)",
                  std::sqrt(diff / norm));
    throw AccuracyFailure(msg);
  }
  return out;
}

SpectralField a2_duhamel(const SpectralField& u0, double t, const Coefficients& c, int n_quad) {
  if (n_quad < 4) throw InvalidInput("a2_duhamel: n_quad must be >= 4");
  const int m = u0.grid.half_extent();
  SpectralField acc(FrequencyGrid(u0.grid.delta(), 2 * m), u0.hermitian);
  if (t == 0.0) return acc;
  const int panels = panel_count(pair_phase_bound(u0) * std::abs(t));
  const auto rule = composite_gauss(0.0, t, panels, n_quad);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double s = rule.nodes[k];
    const auto v = apply_propagator(u0, s);
    accumulate_propagated(acc, bilinear(v, v, c), -s, rule.weights[k]);
  }
  return apply_propagator(acc, t);
}

SpectralField a3_duhamel(const SpectralField& u0, double t, const Coefficients& c, int n_quad,
                         A3Part part) {
  if (n_quad < 4) throw InvalidInput("a3_duhamel: n_quad must be >= 4");
  const int m = u0.grid.half_extent();
  const double d = u0.grid.delta();
  SpectralField acc(FrequencyGrid(d, 3 * m), u0.hermitian);
  if (t == 0.0) return acc;
  const bool with_c1 = part != A3Part::QuadraticPairing;
  const bool with_pair = part != A3Part::C1Only;

  // Phase bound for triples: |Q| <= 240 R^5 and |p| <= 210 R^5 with R the
  // radius of the non-negligible data.
  double r_eff = 0.0;
  for (std::size_t i : significant(u0, 1e-6)) r_eff = std::max(r_eff, std::abs(u0.grid.xi(i)));
  const int panels = panel_count(240.0 * pow5(r_eff) * std::abs(t));
  const auto outer = sorted_rule(0.0, t, panels, n_quad);

  // V(s) = int_0^s U(-r) B(u1(r), u1(r)) dr, advanced node to node.
  SpectralField v_int(FrequencyGrid(d, 2 * m), u0.hermitian);
  double s_prev = 0.0;
  for (std::size_t k = 0; k < outer.s.size(); ++k) {
    const double s = outer.s[k];
    const auto u1 = apply_propagator(u0, s);
    SpectralField integrand(FrequencyGrid(d, 3 * m), u0.hermitian);
    if (with_c1) accumulate(integrand, cubic_term(u1, c.c1), 1.0);
    if (with_pair) {
      const auto inner = composite_gauss(s_prev, s, 1, n_quad);
      for (std::size_t q = 0; q < inner.nodes.size(); ++q) {
        const double r = inner.nodes[q];
        const auto ur = apply_propagator(u0, r);
        accumulate_propagated(v_int, bilinear(ur, ur, c), -r, inner.weights[q]);
      }
      s_prev = s;
      const auto a2 = apply_propagator(v_int, s);
      const auto pair = resize_field(bilinear(resize_field(u1, 2 * m), a2, c), 3 * m);
      accumulate(integrand, pair, 2.0);
    }
    accumulate_propagated(acc, integrand, -s, outer.w[k]);
  }
  return apply_propagator(acc, t);
}

SpectralField a3_1_spectral(const SpectralField& u0, double t, double c1) {
  return a3_spectral(u0, t, Coefficients::unchecked(c1, 0.0, 0.0));
}

SpectralField a3_spectral(const SpectralField& u0, double t, const Coefficients& c) {
  const int m = u0.grid.half_extent();
  const double d = u0.grid.delta();
  SpectralField out(FrequencyGrid(d, 3 * m), u0.hermitian);
  if (t == 0.0) return out;
  const bool with_pair = c.c2 != 0.0 || c.c3 != 0.0;
  const auto idx = significant(u0, 0.0);
  for (std::size_t i : idx) {
    const int m1 = static_cast<int>(i) - m;
    for (std::size_t j : idx) {
      const int m2 = static_cast<int>(j) - m;
      const cplx ab = u0.values[i] * u0.values[j];
      for (std::size_t l : idx) {
        const int m3 = static_cast<int>(l) - m;
        const cplx k = a3_kernel(u0.grid.xi(i), u0.grid.xi(j), u0.grid.xi(l), t, c, true, with_pair);
        out.values[out.grid.index_of_mode(m1 + m2 + m3)] += k * ab * u0.values[l];
      }
    }
  }
  for (std::size_t o = 0; o < out.values.size(); ++o) {
    out.values[o] *= d * d * std::polar(1.0, t * pow5(out.grid.xi(o)));
  }
  return out;
}

double modulation_identity_lhs(double tau, double xi, double tau1, double xi1) {
  return (tau - pow5(xi) / 16.0) - (tau1 - pow5(xi1)) - ((tau - tau1) - pow5(xi - xi1));
}

double modulation_identity_rhs(double xi, double xi1) {
  const double d = 2.0 * xi1 - xi;
  return 5.0 / 16.0 * xi * d * d * (d * d + 2.0 * xi * xi);
}

double modulation_identity_m1_lhs(double tau, double xi, double tau1, double xi1) {
  return (tau1 - pow5(xi1) / 16.0) - (tau - pow5(xi)) + ((tau - tau1) - pow5(xi - xi1));
}

double modulation_identity_m1_rhs(double xi, double xi1) {
  const double d = 2.0 * xi - xi1;
  return 5.0 / 16.0 * xi1 * d * d * (d * d + 2.0 * xi1 * xi1);
}

}  // namespace kdv5
