#include "kdv5/norms.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <random>

#include "kdv5/quadrature.hpp"

namespace kdv5 {

namespace {

constexpr double kZeroTol = 1e-12;

bool near(double x, double y) { return std::abs(x - y) <= 1e-12; }

double modulation_weight(double tau, double xi, double b) {
  const double x2 = xi * xi;
  return std::pow(bracket(tau - x2 * x2 * xi), 2.0 * b);
}

double field_scale(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Per-column |xi| weights of a space-time field, with divergence detection.
struct ColumnWeights {
  std::vector<double> w;
  bool divergent = false;
};

ColumnWeights column_weights(const SpaceTimeField& f, double s, double a) {
  const auto& g = f.grid;
  ColumnWeights out;
  out.w.resize(g.n_xi());
  const double tiny = kZeroTol * field_scale(f.values);
  for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
    out.w[ix] = cell_weight_sq(g.xi(ix), g.xi_axis.delta(), s, a);
    if (std::isinf(out.w[ix])) {
      bool nonzero = false;
      for (std::size_t it = 0; it < g.n_tau(); ++it) {
        if (std::abs(f.at(it, ix)) > tiny) nonzero = true;
      }
      if (nonzero) out.divergent = true;
      out.w[ix] = 0.0;
    }
  }
  return out;
}

SpaceTimeField mask(const SpaceTimeField& f, const auto& keep) {
  SpaceTimeField out = f;
  for (std::size_t it = 0; it < f.grid.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < f.grid.n_xi(); ++ix) {
      if (!keep(f.grid.tau(it), f.grid.xi(ix))) out.at(it, ix) = 0.0;
    }
  }
  return out;
}

}  // namespace

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::Hsa: return "Hsa";
    case NormKind::Xsab: return "Xsab";
    case NormKind::X21: return "X21";
    case NormKind::XLab: return "XLab";
    case NormKind::XLab1: return "XLab1";
    case NormKind::XLa: return "XLa";
    case NormKind::Zsa: return "Zsa";
    case NormKind::DualL2L1: return "DualL2L1";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::D1: return "D1";
    case Region::D2: return "D2";
    case Region::High: return "high";
  }
  return "?";
}

int dyadic_shell(double x) { return static_cast<int>(std::floor(std::log2(bracket(x)))); }

DyadicIndex dyadic_index(double tau, double xi) {
  const double x2 = xi * xi;
  return {dyadic_shell(xi), dyadic_shell(tau - x2 * x2 * xi)};
}

Region region_classify(double tau, double xi) {
  const double ax = std::abs(xi);
  if (ax > 1.0) return Region::High;
  if (ax == 0.0) return Region::D2;
  // |tau| >= |xi|^{-5/3}  <=>  |tau|^3 |xi|^5 >= 1, exact on the boundary.
  const double at = std::abs(tau);
  const double x2 = ax * ax;
  return at * at * at * (x2 * x2 * ax) >= 1.0 ? Region::D1 : Region::D2;
}

double cell_weight_sq(double xi, double delta_xi, double s, double a) {
  if (xi != 0.0) return std::pow(bracket(xi), 2.0 * (s - a)) * std::pow(std::abs(xi), 2.0 * a);
  if (a == 0.0) return 1.0;
  if (2.0 * a <= -1.0) return std::numeric_limits<double>::infinity();
  // <xi> = 1 + O(delta^2) on the origin cell; only |xi|^{2a} is averaged.
  return std::pow(0.5 * delta_xi, 2.0 * a) / (2.0 * a + 1.0);
}

NormValue h_sa_norm(const SpectralField& f, double s, double a) {
  const double tiny = kZeroTol * f.max_abs();
  const double d = f.grid.delta();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double m2 = std::norm(f.values[i]);
    if (m2 == 0.0) continue;
    const double w = cell_weight_sq(f.grid.xi(i), d, s, a);
    if (std::isinf(w)) {
      if (std::sqrt(m2) > tiny) return NormValue::diverges();
      continue;
    }
    sum += m2 * w;
  }
  return {std::sqrt(sum * d), false};
}

NormValue h_sa_norm(const BandSpectrum& f, double s, double a) {
  auto weight = [s, a](double xi) {
    return std::pow(bracket(xi), 2.0 * (s - a)) * std::pow(std::abs(xi), 2.0 * a);
  };
  auto piece = [&](double lo, double hi) {
    // Integrable endpoint singularity at 0 when a < 0.
    if (a < 0.0 && (lo == 0.0 || hi == 0.0)) {
      boost::math::quadrature::tanh_sinh<double> ts;
      return ts.integrate(weight, lo, hi);
    }
    return integrate_adaptive(weight, lo, hi, 1e-12);
  };
  double sum = 0.0;
  for (const auto& b : f.bands) {
    const double m2 = std::norm(b.amp);
    if (m2 == 0.0 || !(b.hi > b.lo)) continue;
    if (b.lo <= 0.0 && b.hi >= 0.0) {
      if (2.0 * a <= -1.0) return NormValue::diverges();
      sum += m2 * (piece(b.lo, 0.0) + piece(0.0, b.hi));
    } else {
      sum += m2 * piece(b.lo, b.hi);
    }
  }
  return {std::sqrt(sum), false};
}

NormValue xsab_norm(const SpaceTimeField& f, double s, double a, double b) {
  const auto cw = column_weights(f, s, a);
  if (cw.divergent) return NormValue::diverges();
  const auto& g = f.grid;
  double sum = 0.0;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const double m2 = std::norm(f.at(it, ix));
      if (m2 == 0.0) continue;
      sum += m2 * cw.w[ix] * modulation_weight(g.tau(it), g.xi(ix), b);
    }
  }
  return {std::sqrt(sum * g.cell_area()), false};
}

double x21_norm(const SpaceTimeField& f, double s) {
  const auto& g = f.grid;
  std::map<int, std::map<int, double>> blocks;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const double m2 = std::norm(f.at(it, ix));
      if (m2 == 0.0) continue;
      const double tau = g.tau(it);
      const double xi = g.xi(ix);
      const auto idx = dyadic_index(tau, xi);
      blocks[idx.j][idx.k] +=
          m2 * std::pow(bracket(xi), 2.0 * s) * modulation_weight(tau, xi, 0.5);
    }
  }
  double outer = 0.0;
  for (const auto& [j, row] : blocks) {
    double l1 = 0.0;
    for (const auto& [k, m2] : row) l1 += std::sqrt(m2 * g.cell_area());
    outer += l1 * l1;
  }
  return std::sqrt(outer);
}

NormValue xl_ab_norm(const SpaceTimeField& f, double a, double b) {
  const auto in_a0 = [](double, double xi) { return dyadic_shell(xi) == 0; };
  const auto low = mask(f, in_a0);
  const auto cw = column_weights(low, a, a);
  if (cw.divergent) return NormValue::diverges();
  const auto& g = f.grid;
  double sum = 0.0;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const double m2 = std::norm(low.at(it, ix));
      if (m2 == 0.0) continue;
      // <xi>^{s-a} is dropped on A_0: the L-norms carry |xi|^a only.
      const double wx = g.xi(ix) == 0.0 ? cw.w[ix] : std::pow(std::abs(g.xi(ix)), 2.0 * a);
      sum += m2 * wx * modulation_weight(g.tau(it), g.xi(ix), b);
    }
  }
  return {std::sqrt(sum * g.cell_area()), false};
}

NormValue xl_ab1_norm(const SpaceTimeField& f, double a, double b) {
  const auto in_a0 = [](double, double xi) { return dyadic_shell(xi) == 0; };
  const auto low = mask(f, in_a0);
  const auto cw = column_weights(low, a, a);
  if (cw.divergent) return NormValue::diverges();
  const auto& g = f.grid;
  std::map<int, double> shells;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const double m2 = std::norm(low.at(it, ix));
      if (m2 == 0.0) continue;
      const double xi = g.xi(ix);
      const double wx = xi == 0.0 ? cw.w[ix] : std::pow(std::abs(xi), 2.0 * a);
      shells[dyadic_index(g.tau(it), xi).k] += m2 * wx;
    }
  }
  double sum = 0.0;
  for (const auto& [k, m2] : shells) sum += std::pow(2.0, b * k) * std::sqrt(m2 * g.cell_area());
  return {sum, false};
}

double xl_a_exponent(const WeightParams& p) {
  const double a = p.a;
  if (near(a, -0.25)) return 0.75;
  if (a > -0.875 && a < -0.25) return 0.6 * a + 0.9;
  if (near(a, -0.875)) {
    const double e1 = p.eps1_or_default();
    if (!(e1 > 0.0) || e1 > p.s + 0.25 + 1e-15) {
      throw InvalidInput("xl_a_norm: eps1 must satisfy 0 < eps1 <= s + 1/4");
    }
    return 0.375 + 0.5 * e1;
  }
  if (a > -1.5 && a < -0.875) {
    const double e2 = p.eps2_or_default();
    if (!(e2 > 0.0) || e2 > -(a + 0.875) + 1e-15) {
      throw InvalidInput("xl_a_norm: eps2 must satisfy 0 < eps2 <= -(a + 7/8)");
    }
    return 0.375 + 0.5 * e2;
  }
  throw InvalidInput("xl_a_norm: a must lie in (-3/2, -1/4]");
}

NormValue xl_a_norm(const SpaceTimeField& f, const WeightParams& p) {
  const double b = xl_a_exponent(p);
  const double a = p.a;
  if (near(a, -0.25)) {
    const auto d1 = mask(f, [](double tau, double xi) { return region_classify(tau, xi) == Region::D1; });
    const auto d2 = mask(f, [](double tau, double xi) { return region_classify(tau, xi) == Region::D2; });
    const auto n1 = xl_ab_norm(d1, a, b);
    const auto n2 = xl_ab1_norm(d2, a, b);
    if (n1.divergent || n2.divergent) return NormValue::diverges();
    return {n1.value + n2.value, false};
  }
  if (a > -0.875 && a < -0.25) return xl_ab1_norm(f, a, b);
  return xl_ab_norm(f, a, b);
}

SpaceTimeField restrict_high(const SpaceTimeField& f) {
  return mask(f, [](double, double xi) { return std::abs(xi) >= 1.0; });
}

SpaceTimeField restrict_low(const SpaceTimeField& f) {
  return mask(f, [](double, double xi) { return std::abs(xi) <= 1.0; });
}

NormValue z_norm(const SpaceTimeField& f, const WeightParams& p) {
  const double hi = x21_norm(restrict_high(f), p.s);
  const auto lo = xl_a_norm(restrict_low(f), p);
  if (lo.divergent) return NormValue::diverges();
  return {hi + lo.value, false};
}

NormValue dual_l2l1_norm(const SpaceTimeField& f, double s, double a) {
  const auto cw = column_weights(f, s, a);
  if (cw.divergent) return NormValue::diverges();
  const auto& g = f.grid;
  double sum = 0.0;
  for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
    double inner = 0.0;
    for (std::size_t it = 0; it < g.n_tau(); ++it) {
      const double m = std::abs(f.at(it, ix));
      if (m == 0.0) continue;
      inner += m * modulation_weight(g.tau(it), g.xi(ix), -0.5);
    }
    inner *= g.delta_tau;
    sum += cw.w[ix] * inner * inner;
  }
  return {std::sqrt(sum * g.xi_axis.delta()), false};
}

bool admissible(double s, double a) {
  if (!(a > -1.5 && a <= -0.25)) return false;
  if (s < std::max(-0.25, s_threshold(a))) return false;
  return !(s == -0.25 && a == -0.875);
}

SpaceTimeField random_modulated_blocks(const SpaceTimeGrid& g, std::uint64_t seed, double max_modulation) {
  if (!(max_modulation >= 1.0)) throw InvalidInput("random_modulated_blocks: max_modulation must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> nd;
  const double xmax = g.xi(g.n_xi() - 1);
  SpaceTimeField f(g);
  const int blocks = 1 + static_cast<int>(rng() % 4);
  for (int b = 0; b < blocks; ++b) {
    const double xc = (2.0 * u01(rng) - 1.0) * 0.85 * xmax;
    const double w = (0.05 + 0.15 * u01(rng)) * xmax;
    const double sig = (rng() % 2 ? 1.0 : -1.0) * std::pow(max_modulation, u01(rng));
    const double h = std::max(2.0 * g.delta_tau, 0.25 * std::abs(sig));
    const cplx amp(nd(rng), nd(rng));
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const double xi = g.xi(ix);
      if (std::abs(xi - xc) > w) continue;
      const double c = xi * xi * xi * xi * xi + sig;
      for (std::size_t it = 0; it < g.n_tau(); ++it)
        if (std::abs(g.tau(it) - c) <= h) f.at(it, ix) += amp;
    }
  }
  const std::size_t i0 = g.xi_axis.index_of_mode(0);
  for (std::size_t it = 0; it < g.n_tau(); ++it) f.at(it, i0) = 0.0;
  return f;
}

EmbeddingFit embedding_chain_fit(const SpaceTimeGrid& g, const WeightParams& p, double eps, int count,
                                 std::uint64_t seed, double max_modulation) {
  if (!(eps > 0.0) || count < 1) throw InvalidInput("embedding_chain_fit: need eps > 0 and count >= 1");
  EmbeddingFit out;
  for (int i = 0; i < count; ++i) {
    const auto f = random_modulated_blocks(g, seed + static_cast<std::uint64_t>(i), max_modulation);
    const auto top = xsab_norm(f, p.s, p.a, 0.75 + eps);
    const auto z = z_norm(f, p);
    const auto bot = xsab_norm(f, p.s, p.a, 0.375);
    if (top.divergent || z.divergent || bot.divergent || top.value == 0.0 || z.value == 0.0) continue;
    out.upper = std::max(out.upper, z.value / top.value);
    out.lower = std::max(out.lower, bot.value / z.value);
    ++out.samples;
  }
  return out;
}

}  // namespace kdv5
