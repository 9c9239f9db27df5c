#pragma once

// Ill-posedness data families as exact band lists, the appendix rectangles,
// and log-log growth fits.

#include <iosfwd>
#include <string>
#include <vector>

#include "kdv5/spectral_core.hpp"

namespace kdv5 {

/// {|xi - xi_center| <= xi_halfwidth, |tau - (shear_slope xi + shear_offset)| <= tau_halfheight}.
struct ShearedRect {
  double xi_center = 0.0;
  double xi_halfwidth = 0.0;
  double shear_slope = 0.0;
  double shear_offset = 0.0;
  double tau_halfheight = 0.0;
  cplx amplitude = 1.0;

  /// Throws InvalidInput unless both half extents are positive.
  void validate() const;
  bool contains(double tau, double xi) const;
  double xi_lo() const { return xi_center - xi_halfwidth; }
  double xi_hi() const { return xi_center + xi_halfwidth; }
  /// Point reflection (tau, xi) -> (-tau, -xi).
  ShearedRect reflected() const;
};

struct RectSpectrum {
  std::vector<ShearedRect> rects;

  /// True when every rectangle has the same shear slope.
  bool common_shear() const;
  cplx value(double tau, double xi) const;
};

/// The literal sets and the shifted R2 used for Example 2 (see README).
struct AppendixRects {
  ShearedRect P1, P2, Q, R1, R2, R3;
  /// R2 moved by +2 N^{-3/2} in xi, inside the plateau of chi_P1 * chi_Q.
  ShearedRect R2_shifted;
};

AppendixRects appendix_rects(double N);

/// N^{-s+2} on [N - N^-4, N + N^-4] plus N^2 on [N^-4/2, N^-4]. Not Hermitian.
BandSpectrum phi_n_c2(double N, double s);
/// delta N^{2a+4} on [+-N - N^-4, +-N + N^-4]. Hermitian.
BandSpectrum phi_n_delta(double N, double delta, double a);
/// N^{-s+2} on the two bands above plus N^{4a+2} on [N^-4/2, 3 N^-4/2]. Not Hermitian.
BandSpectrum psi_n(double N, double s, double a);
/// N^{-s+3/4} on [+-N - N^{-3/2}, +-N + N^{-3/2}]. Hermitian.
BandSpectrum phi_n_cubic(double N, double s);
/// The Hermitian completion of a band list (adds the mirrored conjugate bands).
BandSpectrum hermitian_completion(const BandSpectrum& b);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
};

/// Least-squares line through (log N, log value). Needs >= 3 points and
/// positive values, else InvalidInput.
GrowthFit growth_fit(const std::vector<std::pair<double, double>>& points);

/// Plain-text band format: '#' comments, one band per line "xi_lo xi_hi re im";
/// an optional "hermitian 1" line.
void write_bands(std::ostream& os, const BandSpectrum& b);
BandSpectrum read_bands(std::istream& is);

}  // namespace kdv5
