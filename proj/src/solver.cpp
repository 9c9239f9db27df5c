#include "kdv5/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fft.hpp"
#include "kdv5/errors.hpp"

namespace kdv5 {

namespace {

using CVec = std::vector<cplx>;

// Normalized DFT coefficients a_j, u(x_l) = sum_j a_j e^{2 pi i j l / n}.
CVec coefficients(std::span<const double> u) {
  CVec a(u.begin(), u.end());
  detail::fft_inplace(a, -1);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& z : a) z *= inv;
  return a;
}

// Signed mode index of storage slot j.
int mode(std::size_t j, std::size_t n) {
  return j < n / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
}

// Copy a length-n spectrum into a length-P one, the Nyquist coefficient split
// between +-n/2.
void pad_into(const CVec& a, CVec& out, std::size_t P) {
  const std::size_t n = a.size();
  out.assign(P, cplx(0.0));
  for (std::size_t j = 0; j < n / 2; ++j) out[j] = a[j];
  for (std::size_t j = n / 2 + 1; j < n; ++j) out[P - (n - j)] = a[j];
  out[n / 2] = 0.5 * a[n / 2];
  out[P - n / 2] = 0.5 * a[n / 2];
}

class Stepper {
 public:
  Stepper(const PeriodicGrid& g, const Coefficients& c, int pad)
      : n_(static_cast<std::size_t>(g.n())), P_(n_ * static_cast<std::size_t>(pad)), c_(c), k_(n_), k5_(n_) {
    const double d = g.wavenumber_step();
    for (std::size_t j = 0; j < n_; ++j) {
      // The Nyquist mode is kept at zero, so its wavenumber is immaterial.
      k_[j] = j == n_ / 2 ? 0.0 : d * mode(j, n_);
      k5_[j] = std::pow(k_[j], 5);
    }
  }

  double imag_residue() const { return imag_residue_; }

  // -i k FFT[c1 u^3 + c2 u_x^2 + c3 u u_xx], dealiased.
  void nonlinear(const CVec& a, CVec& out) {
    u_.assign(P_, cplx(0.0));
    ux_.assign(P_, cplx(0.0));
    uxx_.assign(P_, cplx(0.0));
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == n_ / 2) continue;
      const std::size_t p = j < n_ / 2 ? j : P_ - (n_ - j);
      u_[p] = a[j];
      ux_[p] = cplx(0.0, k_[j]) * a[j];
      uxx_[p] = -k_[j] * k_[j] * a[j];
    }
    detail::fft_inplace(u_, +1);
    detail::fft_inplace(ux_, +1);
    detail::fft_inplace(uxx_, +1);
    double im = 0.0, re = 0.0;
    for (std::size_t l = 0; l < P_; ++l) {
      im = std::max(im, std::abs(u_[l].imag()));
      re = std::max(re, std::abs(u_[l]));
      const cplx u = u_[l];
      u_[l] = c_.c1 * u * u * u + c_.c2 * ux_[l] * ux_[l] + c_.c3 * u * uxx_[l];
    }
    if (re > 0.0) imag_residue_ = std::max(imag_residue_, im / re);
    detail::fft_inplace(u_, -1);
    const double inv = 1.0 / static_cast<double>(P_);
    out.assign(n_, cplx(0.0));
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == n_ / 2) continue;
      const std::size_t p = j < n_ / 2 ? j : P_ - (n_ - j);
      out[j] = cplx(0.0, -k_[j]) * u_[p] * inv;
    }
  }

  // One Lawson RK4 step of size h.
  void step(CVec& a, double h) {
    const std::size_t n = n_;
    e1_.resize(n);
    e2_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      e1_[j] = std::polar(1.0, k5_[j] * h);
      e2_[j] = std::polar(1.0, 0.5 * k5_[j] * h);
    }
    nonlinear(a, k1_);
    tmp_.resize(n);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = e2_[j] * (a[j] + 0.5 * h * k1_[j]);
    nonlinear(tmp_, k2_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = e2_[j] * a[j] + 0.5 * h * k2_[j];
    nonlinear(tmp_, k3_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = e1_[j] * a[j] + h * e2_[j] * k3_[j];
    nonlinear(tmp_, k4_);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = e1_[j] * a[j] +
             (h / 6.0) * (e1_[j] * k1_[j] + 2.0 * e2_[j] * (k2_[j] + k3_[j]) + k4_[j]);
    }
  }

 private:
  std::size_t n_, P_;
  Coefficients c_;
  std::vector<double> k_, k5_;
  CVec u_, ux_, uxx_, k1_, k2_, k3_, k4_, tmp_, e1_, e2_;
  double imag_residue_ = 0.0;
};

// max |a_j| over |j| >= 3n/8 relative to the peak.
double tail_ratio(const CVec& a) {
  const std::size_t n = a.size();
  double peak = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = std::abs(a[j]);
    peak = std::max(peak, v);
    if (8 * std::abs(mode(j, n)) >= static_cast<int>(3 * n)) tail = std::max(tail, v);
  }
  return peak == 0.0 ? 0.0 : tail / peak;
}

double h1a(std::span<const double> u, const PeriodicGrid& g, double a) {
  const auto v = h_sa_norm(forward_transform(u, g), 1.0, a);
  return v.divergent ? std::numeric_limits<double>::infinity() : v.value;
}

void check_size(std::span<const double> u, const PeriodicGrid& g, const char* who) {
  if (u.size() != static_cast<std::size_t>(g.n())) {
    throw InvalidResolution(std::string(who) + ": sample count does not match the grid");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("SolverConfig: dt must be positive");
  if (!(T >= dt)) throw InvalidInput("SolverConfig: T must be at least dt");
  if (dealias_pad < 2) throw InvalidInput("SolverConfig: dealias_pad must be >= 2");
  if (monitor_every < 1) throw InvalidInput("SolverConfig: monitor_every must be >= 1");
}

double l2_norm(std::span<const double> u, const PeriodicGrid& grid) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s * grid.dx());
}

double h1_functional(std::span<const double> u, const PeriodicGrid& grid, double alpha) {
  check_size(u, grid, "h1_functional");
  const auto a = coefficients(u);
  const std::size_t n = a.size();
  const double d = grid.wavenumber_step();
  double grad = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double k = d * mode(j, n);
    // Nyquist: the split halves carry k^2 |a|^2 / 2 together.
    grad += (j == n / 2 ? 0.5 : 1.0) * k * k * std::norm(a[j]);
  }
  grad *= grid.length();
  CVec p;
  pad_into(a, p, 2 * n);
  detail::fft_inplace(p, +1);
  double cube = 0.0;
  for (const auto& z : p) cube += z.real() * z.real() * z.real();
  cube *= grid.length() / static_cast<double>(2 * n);
  return grad + 0.4 * alpha * cube;
}

Trajectory evolve(std::span<const double> u0, const SolverConfig& cfg) {
  cfg.validate();
  check_size(u0, cfg.grid, "evolve");
  for (double v : u0) {
    if (!std::isfinite(v)) throw InvalidInput("evolve: non-finite initial data");
  }
  const std::size_t n = u0.size();
  CVec a = coefficients(u0);
  if (tail_ratio(a) > 1e-10) throw InvalidResolution("evolve: initial data not resolved (tail > 1e-10 of peak)");
  a[n / 2] = 0.0;

  Trajectory tr;
  tr.grid = cfg.grid;
  tr.monitor_a = cfg.monitor_a;
  tr.steps = static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9));
  tr.dt = cfg.T / tr.steps;

  Stepper st(cfg.grid, cfg.coeffs, cfg.dealias_pad);
  CVec phys;
  double l2_0 = 0.0;
  auto record = [&](double t) {
    phys = a;
    detail::fft_inplace(phys, +1);
    std::vector<double> u(n);
    double im = 0.0, re = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      u[l] = phys[l].real();
      im = std::max(im, std::abs(phys[l].imag()));
      re = std::max(re, std::abs(phys[l]));
    }
    if (re > 0.0) tr.imag_residue = std::max(tr.imag_residue, im / re);
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    const double l2 = std::sqrt(s * cfg.grid.length());
    if (tr.t.empty()) l2_0 = l2;
    if (!std::isfinite(l2) || l2 > 1e6 * l2_0) {
      throw AbortedRun("evolve: L^2 norm grew by more than 1e6 at t = " + std::to_string(t));
    }
    if (!tr.accuracy_warning && tail_ratio(a) > 1e-6) {
      tr.accuracy_warning = true;
      tr.warning = "spectral tail above 1e-6 of the peak at t = " + std::to_string(t);
    }
    tr.t.push_back(t);
    tr.l2.push_back(l2);
    tr.h1_functional.push_back(h1_functional(u, cfg.grid, cfg.alpha));
    tr.h1a_norm.push_back(h1a(u, cfg.grid, cfg.monitor_a));
    tr.states.push_back(std::move(u));
  };

  record(0.0);
  for (int s = 1; s <= tr.steps; ++s) {
    st.step(a, tr.dt);
    if (s % cfg.monitor_every == 0 || s == tr.steps) record(s * tr.dt);
  }
  tr.imag_residue = std::max(tr.imag_residue, st.imag_residue());
  return tr;
}

std::vector<double> conserved_l2(const Trajectory& traj) {
  std::vector<double> out;
  if (traj.l2.empty()) return out;
  const double l0 = traj.l2.front();
  for (double v : traj.l2) out.push_back(l0 == 0.0 ? 0.0 : std::abs(v - l0) / l0);
  return out;
}

std::vector<double> h1_functional_drift(const Trajectory& traj) {
  std::vector<double> out;
  if (traj.h1_functional.empty()) return out;
  const double h0 = traj.h1_functional.front();
  // The functional is indefinite; scale by the gradient part when H(0) is small.
  const double grad = h1_functional(traj.states.front(), traj.grid, 0.0);
  const double scale = std::max(std::abs(h0), grad);
  for (double v : traj.h1_functional) out.push_back(scale == 0.0 ? 0.0 : std::abs(v - h0) / scale);
  return out;
}

double apriori_bracket(std::span<const double> u0, const PeriodicGrid& grid, double a, double T) {
  const double h = h1a(u0, grid, a);
  const double l2 = l2_norm(u0, grid);
  const double h1 = h1a(u0, grid, 0.0);
  return h * h + std::pow(l2, 10.0 / 3.0) + std::pow(T, 4.0 / 3.0) * (std::pow(h1, 10.0 / 3.0) + std::pow(l2, 5));
}

AprioriResult apriori_check(const Trajectory& traj, double a, double T) {
  if (traj.states.empty()) throw InvalidInput("apriori_check: empty trajectory");
  if (!(a >= -1.0 && a <= -0.25)) throw InvalidInput("apriori_check: a must lie in [-1, -1/4]");
  AprioriResult r;
  for (const auto& u : traj.states) {
    const double h = h1a(u, traj.grid, a);
    if (std::isinf(h)) {
      r.divergent = true;
      r.lhs = r.ratio = std::numeric_limits<double>::infinity();
      return r;
    }
    r.lhs = std::max(r.lhs, h * h);
  }
  r.rhs_bracket = apriori_bracket(traj.states.front(), traj.grid, a, T);
  if (std::isinf(r.rhs_bracket)) {
    r.divergent = true;
    r.ratio = std::numeric_limits<double>::infinity();
    return r;
  }
  r.ratio = r.rhs_bracket == 0.0 ? 0.0 : r.lhs / r.rhs_bracket;
  return r;
}

ScaledData scaling_transform(std::span<const double> u0, const PeriodicGrid& grid, double lambda) {
  if (!(lambda >= 1.0)) throw InvalidInput("scaling_transform: lambda >= 1 required");
  check_size(u0, grid, "scaling_transform");
  ScaledData out{PeriodicGrid(lambda * grid.length(), grid.n()), {}};
  out.u.reserve(u0.size());
  const double f = 1.0 / (lambda * lambda);
  for (double v : u0) out.u.push_back(f * v);
  return out;
}

ScalingCheck scaling_check(std::span<const double> u0, const PeriodicGrid& grid, double s, double a,
                           double lambda) {
  const auto scaled = scaling_transform(u0, grid, lambda);
  const auto n0 = h_sa_norm(forward_transform(u0, grid), s, a);
  const auto n1 = h_sa_norm(forward_transform(std::span<const double>(scaled.u), scaled.grid), s, a);
  ScalingCheck c;
  c.lhs = n1.value;
  c.rhs = std::pow(lambda, -1.5 - a) * n0.value;
  // Equality is attained for s = a; allow for rounding.
  c.holds = !n0.divergent && !n1.divergent && c.lhs <= c.rhs * (1.0 + 1e-12);
  return c;
}

std::vector<double> random_smooth_data(const PeriodicGrid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(grid.n()), 0.0);
  for (int b = 0; b < 3; ++b) {
    const double c = amplitude * uni(rng);
    const double w = 1.5 + 0.5 * uni(rng);
    const double x0 = 0.125 * grid.length() * uni(rng);
    for (int j = 0; j < grid.n(); ++j) {
      const double y = (grid.x(j) - x0) / w;
      u[static_cast<std::size_t>(j)] += c * y * std::exp(-y * y);
    }
  }
  return u;
}

std::vector<double> reflect(std::span<const double> u) {
  const std::size_t n = u.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = u[(n - j) % n];
  return out;
}

}  // namespace kdv5
