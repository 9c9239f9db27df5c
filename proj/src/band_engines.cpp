#include "kdv5/band_engines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kdv5/quadrature.hpp"

namespace kdv5 {

namespace {

double pow5(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}

double weight_sq(double xi, double s, double a) {
  if (xi == 0.0) return 0.0;
  return std::pow(bracket(xi), 2.0 * (s - a)) * std::pow(std::abs(xi), 2.0 * a);
}

// Split [lo, hi] at the interior points of `cuts`.
std::vector<double> split(double lo, double hi, std::initializer_list<double> cuts) {
  std::vector<double> pts{lo};
  for (double c : cuts) {
    if (c > lo && c < hi) pts.push_back(c);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  return pts;
}

// Values are evaluated at xi = alpha + y with alpha a breakpoint: every
// integration variable is an offset from a fixed base, so small differences of
// large frequencies are formed once per interval (a smooth shift) rather than
// per node (noise).
using ValueFn = std::function<cplx(double alpha, double y, double rel_tol, double abs_tol)>;

// Relative tolerance of the scale-finding pass.
constexpr double kCoarseRel = 1e-4;

// sqrt of int w |v|^2 over the breakpoint intervals. A coarse sampling pass
// fixes the absolute scales handed to the adaptive pass.
NormValue output_norm(const ValueFn& value, const std::vector<double>& breaks, double s, double a,
                      double rel_tol, int max_intervals) {
  const auto& gl = gauss_legendre(8);
  double coarse = 0.0, peak = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double alpha = breaks[k], len = breaks[k + 1] - breaks[k];
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double y = 0.5 * len * (1.0 + gl.nodes[q]);
      const cplx v = value(alpha, y, kCoarseRel, 0.0);
      peak = std::max(peak, std::abs(v));
      coarse += 0.5 * len * gl.weights[q] * weight_sq(alpha + y, s, a) * std::norm(v);
    }
  }
  if (peak == 0.0) return {0.0, false};
  const double inner_abs = 0.1 * rel_tol * peak;
  const double inner_rel = 0.1 * rel_tol;
  const double piece_abs = rel_tol * coarse / static_cast<double>(breaks.size());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double alpha = breaks[k];
    auto integrand = [&](double y) {
      return weight_sq(alpha + y, s, a) * std::norm(value(alpha, y, inner_rel, inner_abs));
    };
    total += integrate_gk(integrand, 0.0, breaks[k + 1] - alpha, rel_tol, piece_abs, max_intervals);
  }
  return {std::sqrt(total), false};
}

cplx a2_value(const BandSpectrum& u0, double alpha, double y, double t, const Coefficients& c,
              double rel_tol, double abs_tol) {
  const auto& bands = u0.bands;
  const double xi = alpha + y;
  cplx sum = 0.0;
  // The kernel is symmetric in (xi1, xi2): unordered band pairs, doubled off the
  // diagonal. xi1 = lo_i + x, xi2 = (alpha - lo_i) + y - x.
  for (std::size_t i = 0; i < bands.size(); ++i) {
    for (std::size_t j = i; j < bands.size(); ++j) {
      const auto& bi = bands[i];
      const auto& bj = bands[j];
      const cplx amp = bi.amp * bj.amp * (i == j ? 1.0 : 2.0);
      if (amp == cplx(0.0)) continue;
      const double d = alpha - bi.lo;
      const double lo = std::max(0.0, (d - bj.hi) + y);
      const double hi = std::min(bi.hi - bi.lo, (d - bj.lo) + y);
      if (!(hi > lo)) continue;
      auto f = [&](double x) { return a2_kernel_sums(xi, bi.lo + x, (d + y) - x, t, c); };
      sum += amp * integrate_gk(f, lo, hi, rel_tol, abs_tol / std::abs(amp));
    }
  }
  return std::polar(1.0, t * pow5(xi)) * sum;
}

cplx a3_value(const BandSpectrum& u0, double alpha, double y, double t, const Coefficients& c,
              double inner_rel, const BandEngineOptions& opt, double abs_tol) {
  const auto& bands = u0.bands;
  const double xi = alpha + y;
  cplx sum = 0.0;
  for (const auto& bi : bands) {
    const double di = alpha - bi.lo;  // eta = di + y - x1
    // a3 kernels are symmetric in (xi2, xi3).
    for (std::size_t j = 0; j < bands.size(); ++j) {
      for (std::size_t k = j; k < bands.size(); ++k) {
        const auto& bj = bands[j];
        const auto& bk = bands[k];
        const cplx amp = bi.amp * bj.amp * bk.amp * (j == k ? 1.0 : 2.0);
        if (amp == cplx(0.0)) continue;
        const double lo = std::max(0.0, (di - bj.hi - bk.hi) + y);
        const double hi = std::min(bi.hi - bi.lo, (di - bj.lo - bk.lo) + y);
        if (!(hi > lo)) continue;
        const double dij = di - bj.lo;      // xi3 = dij + y - x1 - x2
        const double sij = bi.lo + bj.lo;   // xi1 + xi2 = sij + x1 + x2
        const double dj = alpha - bj.lo;    // xi3 + xi1 = dj + y - x2
        const double tol = abs_tol / std::abs(amp) / (hi - lo);
        auto inner = [&](double x1) {
          const double eta = (di + y) - x1;
          const double l2 = std::max(0.0, (dij - bk.hi) + y - x1);
          const double h2 = std::min(bj.hi - bj.lo, (dij - bk.lo) + y - x1);
          auto g = [&](double x2) {
            const TripleSums z{xi, bi.lo + x1, bj.lo + x2, (dij + y) - x1 - x2, eta, sij + x1 + x2,
                               (dj + y) - x2};
            return a3_kernel_averaged(z, t, c, opt.p_cut, opt.q_cut);
          };
          return integrate_gk(g, l2, h2, inner_rel, tol, opt.max_intervals);
        };
        const auto pts = split(lo, hi, {(di - bj.lo - bk.hi) + y, (di - bj.hi - bk.lo) + y});
        for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
          sum += amp * integrate_gk(inner, pts[q], pts[q + 1], inner_rel, tol * (pts[q + 1] - pts[q]),
                                    opt.max_intervals);
        }
      }
    }
  }
  return std::polar(1.0, t * pow5(xi)) * sum;
}

}  // namespace

std::vector<double> sum_breakpoints(const BandSpectrum& u0, int order) {
  const auto ends = u0.breakpoints();
  std::vector<double> sums{0.0};
  std::vector<double> level{0.0};
  for (int k = 0; k < order; ++k) {
    std::vector<double> next;
    for (double x : level) {
      for (double e : ends) next.push_back(x + e);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  sums.insert(sums.end(), level.begin(), level.end());
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return sums;
}

cplx a2_band_value(const BandSpectrum& u0, double xi, double t, const Coefficients& c,
                   double rel_tol, double abs_tol) {
  return a2_value(u0, xi, 0.0, t, c, rel_tol, abs_tol);
}

cplx a3_band_value(const BandSpectrum& u0, double xi, double t, const Coefficients& c,
                   const BandEngineOptions& opt, double abs_tol) {
  return a3_value(u0, xi, 0.0, t, c, 0.1 * opt.rel_tol, opt, abs_tol);
}

NormValue a2_band_norm(const BandSpectrum& u0, double t, const Coefficients& c, double s, double a,
                       double rel_tol) {
  auto value = [&](double alpha, double y, double rel, double abs_tol) {
    return a2_value(u0, alpha, y, t, c, rel, abs_tol);
  };
  return output_norm(value, sum_breakpoints(u0, 2), s, a, rel_tol, 400);
}

NormValue a3_band_norm(const BandSpectrum& u0, double t, const Coefficients& c, double s, double a,
                       const BandEngineOptions& opt) {
  auto value = [&](double alpha, double y, double rel, double abs_tol) {
    return a3_value(u0, alpha, y, t, c, rel, opt, abs_tol);
  };
  return output_norm(value, sum_breakpoints(u0, 3), s, a, opt.rel_tol, opt.max_intervals);
}

}  // namespace kdv5
