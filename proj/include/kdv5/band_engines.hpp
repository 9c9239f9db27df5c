#pragma once

// A2 and A3 for piecewise-constant data given as exact band lists. Values are
// nested adaptive Gauss-Kronrod integrals over the band overlaps, so bands of
// width N^-4 next to bands at N cost the same as O(1) bands.

#include <vector>

#include "kdv5/duhamel.hpp"
#include "kdv5/norms.hpp"

namespace kdv5 {

struct BandEngineOptions {
  /// Relative tolerance on the output norm.
  double rel_tol = 1e-8;
  /// Rotation cutoffs for the averaged A3 kernel (see a3_kernel_averaged).
  double p_cut = 100.0;
  double q_cut = 2000.0;
  /// Panel budget per one-dimensional adaptive integral.
  int max_intervals = 400;
};

/// Sorted sums of `order` band endpoints (with repetition), plus 0: the points
/// where the A2 (order 2) or A3 (order 3) integrand can lose smoothness in xi.
std::vector<double> sum_breakpoints(const BandSpectrum& u0, int order);

/// Â2(xi) at a single frequency.
cplx a2_band_value(const BandSpectrum& u0, double xi, double t, const Coefficients& c,
                   double rel_tol = 1e-11, double abs_tol = 0.0);

/// Â3(xi) at a single frequency with the averaged kernel.
cplx a3_band_value(const BandSpectrum& u0, double xi, double t, const Coefficients& c,
                   const BandEngineOptions& opt, double abs_tol = 0.0);

/// ||A2(u0)(t)||_{H^{s,a}} by adaptive integration of <xi>^{2(s-a)} |xi|^{2a} |Â2|^2.
NormValue a2_band_norm(const BandSpectrum& u0, double t, const Coefficients& c, double s, double a,
                       double rel_tol = 1e-8);

/// Same for A3; opt.rel_tol defaults to 1e-8 but 1e-3 is the practical setting.
NormValue a3_band_norm(const BandSpectrum& u0, double t, const Coefficients& c, double s, double a,
                       const BandEngineOptions& opt);

}  // namespace kdv5
