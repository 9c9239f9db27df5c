#pragma once

// Resonance functions, oscillatory time factors and the quadratic/cubic
// Picard terms A2, A3 of
//   u_t - u_xxxxx + c1 (u^3)_x + c2 ((u_x)^2)_x + c3 (u u_xx)_x = 0.
//
// Fourier form used throughout (u^ = int u e^{-i xi x} dx):
//   A2^(xi) = e^{it xi^5}/(2 pi) int xi beta(xi1, xi2) Phi(q1, t) u0^(xi1) u0^(xi2) dxi1
// with xi2 = xi - xi1, beta(x, y) = c2 x y + c3 (x^2 + y^2)/2 and
// Phi(q, t) = (1 - e^{-iqt})/q.

#include "kdv5/spectral_core.hpp"

namespace kdv5 {

struct Coefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 1.0;

  Coefficients() = default;
  /// Throws InvalidInput when c3 == 0.
  Coefficients(double c1_, double c2_, double c3_);
  /// No c3 != 0 check; used for the linear flow and solver diagnostics.
  static Coefficients unchecked(double c1, double c2, double c3);
  /// Integrable preset (c1, c2, c3) = (-2 alpha^2 / 5, alpha, 2 alpha).
  static Coefficients lax(double alpha);
  /// Same with c1 = -2 alpha / 5 (not conservative; kept for the regression test).
  static Coefficients lax_linear_c1(double alpha);

  /// beta(x, y) = c2 x y + c3 (x^2 + y^2) / 2.
  double beta(double x, double y) const { return c2 * x * y + 0.5 * c3 * (x * x + y * y); }
};

/// (5/2) xi xi1 xi2 (xi^2 + xi1^2 + xi2^2) with xi = xi1 + xi2.
double resonance_q1(double xi1, double xi2);
/// (5/2)(xi1+xi2)(xi2+xi3)(xi3+xi1){(xi1+xi2)^2 + (xi2+xi3)^2 + (xi3+xi1)^2}.
double resonance_q2(double xi1, double xi2, double xi3);

/// Divided differences of exp at complex nodes, stable for clustered nodes.
cplx exp_dd(cplx a, cplx b);
cplx exp_dd(cplx a, cplx b, cplx c);

/// (1 - e^{-iqt}) / q, continuous at q = 0 (value it).
cplx phi_factor(double q, double t);
/// int_0^t e^{-isq} ds = -i phi_factor(q, t).
cplx exp_integral(double q, double t);
/// int_0^t e^{-isp} int_0^s e^{-ir(Q-p)} dr ds = t^2 dd[0, -itp, -itQ].
cplx pairing_factor(double p, double Q, double t);

/// Kernels for piecewise-constant data: Â2(xi) = e^{it xi^5} int a2_kernel u^ u^ dxi1.
cplx a2_kernel(double xi1, double xi2, double t, const Coefficients& c);
/// Â3(xi) = e^{it xi^5} iint a3_kernel u^ u^ u^ dxi1 dxi2 (xi3 = xi - xi1 - xi2), the
/// u1 factor is xi1 and A2 pairs (xi2, xi3).
cplx a3_kernel(double xi1, double xi2, double xi3, double t, const Coefficients& c,
               bool with_c1 = true, bool with_pairing = true);

/// Frequencies of a triple with the pair sums supplied by the caller (they can
/// often be formed without cancelling large numbers): xi = xi1 + xi2 + xi3,
/// eta = xi2 + xi3, s12 = xi1 + xi2, s31 = xi3 + xi1.
struct TripleSums {
  double xi, xi1, xi2, xi3, eta, s12, s31;
  static TripleSums from(double xi1, double xi2, double xi3);
};

/// a2_kernel with xi supplied (xi = xi1 + xi2).
cplx a2_kernel_sums(double xi, double xi1, double xi2, double t, const Coefficients& c);

/// a3_kernel with the fast rotations dropped: in t^2 dd[0, b, c] (b = -itp,
/// c = -itQ) the e^b / b part goes once |b| > p_cut, the e^c / c part once
/// |c| > q_cut, in both cases only while |b - c| > p_cut / 2 so nothing is
/// divided by a small gap; the c1 factor drops e^c once |c| > q_cut. What
/// remains is smooth, and the dropped parts integrate to O(1/cut^2) relative
/// over non-stationary regions. Infinite cuts give a3_kernel.
cplx a3_kernel_averaged(const TripleSums& z, double t, const Coefficients& c, double p_cut,
                        double q_cut);
cplx a3_kernel_averaged(double xi1, double xi2, double xi3, double t, const Coefficients& c,
                        double p_cut, double q_cut);

/// Spectral (exact-in-time) formula for A2 on the data grid; output half extent 2M.
/// The xi1 sum is a trapezoid rule; the two interleaved stride-2 subrules must
/// agree to `tol` relative (l^2) or AccuracyFailure is thrown.
SpectralField a2_spectral(const SpectralField& u0, double t, const Coefficients& c,
                          double tol = 1e-8);

/// Gauss-Legendre quadrature in s of the Duhamel integral; products through
/// zero-padded spectral convolution. Panels are sized so each spans <= 8 rad of
/// the largest resonance phase; n_quad nodes per panel.
SpectralField a2_duhamel(const SpectralField& u0, double t, const Coefficients& c, int n_quad);

enum class A3Part { C1Only, QuadraticPairing, Full };

/// Third Taylor coefficient of the flow by iterated Duhamel; output half extent 3M.
SpectralField a3_duhamel(const SpectralField& u0, double t, const Coefficients& c, int n_quad,
                         A3Part part = A3Part::Full);

/// The c1 part of A3 by its double-sum spectral formula.
SpectralField a3_1_spectral(const SpectralField& u0, double t, double c1);
/// The full A3 by double sums with a3_kernel.
SpectralField a3_spectral(const SpectralField& u0, double t, const Coefficients& c);

/// Largest |xi| carrying a nonzero amplitude.
double support_radius(const SpectralField& f);

/// Zero-extend (or truncate) a field to half extent m on the same spacing.
SpectralField resize_field(const SpectralField& f, int half_extent);

/// Relative l^2 distance ||f - g|| / ||g|| of fields on equal spacing.
double relative_l2_difference(const SpectralField& f, const SpectralField& g);

/// Both sides of the modulation identities behind the measure bounds.
double modulation_identity_lhs(double tau, double xi, double tau1, double xi1);
double modulation_identity_rhs(double xi, double xi1);
double modulation_identity_m1_lhs(double tau, double xi, double tau1, double xi1);
double modulation_identity_m1_rhs(double xi, double xi1);

}  // namespace kdv5
