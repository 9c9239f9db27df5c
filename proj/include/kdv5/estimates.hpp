#pragma once

// Convolution engines for sheared rectangles and grids, the bilinear ratio
// ||xi (xi^2 f) * g||_{X^{s,a,b-1}} / (||f|| ||g||)_{X^{s,a,b}} with the appendix
// sweeps, brute-force measure bounds, and a
// [k;Z]-multiplier norm estimator on cyclic groups.

#include <cstdint>
#include <string>
#include <vector>

#include "kdv5/counterexamples.hpp"
#include "kdv5/norms.hpp"

namespace kdv5 {

/// x -> int over [a1, b1] cap [x - b2, x - a2] of t^moment dt (moment 0 or 2):
/// the convolution of two interval indicators, with an optional t^2 weight on
/// the first factor.
struct BoxProfile {
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  int moment = 0;

  double operator()(double x) const;
  double lo() const { return a1 + a2; }
  double hi() const { return b1 + b2; }
  /// Points where the profile is not smooth: lo, hi and the two plateau ends.
  std::vector<double> kinks() const;
};

struct SurfaceTerm {
  cplx amp = 1.0;
  BoxProfile xi;
  BoxProfile sigma;
};

/// Exact f * g of two same-shear rectangle sums. In sheared coordinates
/// sigma = tau - shear_slope * xi it is a sum of separable products.
struct PiecewiseBilinearSurface {
  double shear_slope = 0.0;
  std::vector<SurfaceTerm> terms;

  cplx value(double tau, double xi) const;
  cplx value_sheared(double sigma, double xi) const;
  std::vector<double> xi_kinks() const;
  std::vector<double> sigma_kinks() const;
};

/// Throws InvalidInput when the shears differ (rasterize and use convolve_grid).
/// xi_moment = 2 weights f by xi^2 before convolving.
PiecewiseBilinearSurface convolve_exact(const RectSpectrum& f, const RectSpectrum& g, int xi_moment = 0);

/// Minimum of Re(f * g) over a rectangle sharing the surface's shear. Exact for
/// xi_moment 0: each term is bilinear between consecutive kinks.
double min_over(const PiecewiseBilinearSurface& s, const ShearedRect& r);

/// Discrete linear convolution on a shared grid, scaled by the cell area; the
/// result has both half extents doubled. InvalidInput on grid mismatch.
SpaceTimeField convolve_grid(const SpaceTimeField& f, const SpaceTimeField& g);

/// A field in a local sheared frame: node (it, ix) sits at
/// sigma = sigma0 + tau(it), xi = xi0 + xi(ix).
struct LocalRaster {
  double xi0 = 0.0;
  double sigma0 = 0.0;
  double shear_slope = 0.0;
  SpaceTimeField field;
};

/// Cell-coverage rasterization of one rectangle; cell faces start at its lower
/// edges in xi and sigma.
LocalRaster rasterize(const ShearedRect& r, double d_xi, double d_sigma);
/// convolve_grid with the origins added; spacings and shears must match.
LocalRaster convolve_raster(const LocalRaster& f, const LocalRaster& g);
/// max |raster - exact| / max |exact| over the raster nodes.
double raster_deviation(const LocalRaster& r, const PiecewiseBilinearSurface& exact);

/// Ratio LHS / RHS of the bilinear estimate for grid data (absolute frequencies).
/// InvalidInput for a zero denominator; a divergent norm is propagated.
NormValue be3_ratio(const SpaceTimeField& f, const SpaceTimeField& g, double s, double a, double b);

/// ||f||_{X^{s,a,b}} of one sheared rectangle by adaptive quadrature.
NormValue rect_xsab_norm(const ShearedRect& r, double s, double a, double b);
/// ||xi * surface||_{X^{s,a,b}} by adaptive quadrature in sheared coordinates.
NormValue surface_xsab_norm(const PiecewiseBilinearSurface& h, double s, double a, double b);
/// The ratio for rectangle data, using the exact convolution.
NormValue be3_ratio(const ShearedRect& f, const ShearedRect& g, double s, double a, double b);

enum class AppendixExample { Ex1, Ex2, Ex3a, Ex3b };
const char* to_string(AppendixExample e);
/// "1", "2", "3a", "3b"; InvalidInput otherwise.
AppendixExample parse_example(const std::string& id);

struct ExamplePair {
  ShearedRect f, g;
  /// Region carrying the lower bound f * g >= c N^{-3/2}.
  ShearedRect region;
};
/// Example 2 uses the shifted R2 (the literal one touches the edge of f * g).
ExamplePair example_pair(AppendixExample e, double N);
/// N^{3/2} min_{region} f * g.
double lower_bound_constant(AppendixExample e, double N);

struct SweepRow {
  double b = 0.0;
  double slope = 0.0;
  std::vector<double> ratios;  // one per N
};

struct SweepResult {
  std::vector<double> N;
  std::vector<SweepRow> rows;
  /// Linearly interpolated b where the slope first changes sign; NaN if none.
  double crossing = 0.0;
};

/// For each b, the log-log slope of be3_ratio against N. N_list needs >= 3
/// values spanning a factor >= 4.
SweepResult necessary_condition_sweep(AppendixExample e, double s, double a,
                                      const std::vector<double>& b_list,
                                      const std::vector<double>& N_list);

struct MeasureCheck {
  double area = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

/// Area of {(tau1, xi1): <tau1 - xi1^5> in [2^k1, 2^{k1+1}),
/// <(tau - tau1) - (xi - xi1)^5> in [2^k2, 2^{k2+1}), |2 xi1 - xi| >= K} by
/// counting the cell centres of a resolution x resolution raster of the
/// admissible box in (xi1, tau1 - xi1^5), against
/// min{K^-3 2^{k1+k2} |xi|^-1, 2^{k1+k2} |xi|^{-3/2}}.
MeasureCheck measure_bound_check(double tau, double xi, int k1, int k2, double K, int resolution);

/// The companion set over (tau, xi) for fixed (tau1, xi1):
/// <tau - xi^5> in B_k, <(tau - tau1) - (xi - xi1)^5> in B_k2, |2 xi - xi1| >= K1,
/// against min{K1^-3 |xi1|^-1 2^{k+k2}, |xi1|^{-3/2} 2^{3k/4} 2^{k2}}.
MeasureCheck measure_bound_check_m1(double tau1, double xi1, int k, int k2, double K1, int resolution);

struct MeasureSuite {
  /// max ratio at the base and the doubled resolution.
  double constant = 0.0;
  double constant_refined = 0.0;
  /// Largest relative area change under refinement among sets of area >= 1e-3 * bound.
  double worst_area_change = 0.0;
  int configurations = 0;
};

/// `count` random configurations of measure_bound_check (m1 = false) or
/// measure_bound_check_m1, each at `resolution` and 2 * resolution.
MeasureSuite measure_suite(bool m1, int count, int resolution, std::uint64_t seed);

/// Multiplier on Gamma_k(Z_n): values indexed by (xi_1, ..., xi_{k-1}) in base n,
/// xi_1 fastest; xi_k = -(xi_1 + ... + xi_{k-1}) mod n.
struct MultiplierInstance {
  int n = 2;
  int k = 2;
  std::vector<cplx> m;

  MultiplierInstance(int n_, int k_);
  /// Throws InvalidInput unless n >= 2, k >= 2 and m has n^{k-1} entries.
  void validate() const;
  cplx& at(const std::vector<int>& free);
};

struct MultiplierEstimate {
  /// Best value found: a lower bound for ||m||_{[k;Z]}.
  double estimate = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int restarts = 0;
};

/// Alternating maximization over unit f_i from random starts.
MultiplierEstimate multiplier_norm(const MultiplierInstance& inst, int restarts, double tol,
                                   std::uint64_t seed);

/// The [k1 + k2]-multiplier m1(xi_1..xi_k1) m2(xi_{k1+1}..xi_{k1+k2}) for m1, m2
/// given on Z_n^{k1}, Z_n^{k2} (flattened, first index fastest).
MultiplierInstance compose(int n, int k1, const std::vector<cplx>& m1, int k2, const std::vector<cplx>& m2);
/// The same function read as a [k+1]-multiplier (its last argument is implied).
MultiplierInstance as_multiplier(int n, int k, const std::vector<cplx>& m);

struct TTStarResult {
  double lhs = 0.0;  // ||m(xi_1..xi_k) conj m(-xi_{k+1}..-xi_{2k})||_{[2k]}
  double rhs = 0.0;  // ||m||_{[k+1]}
  double rel_gap = 0.0;  // |lhs - rhs^2| / rhs^2
};

/// m is a function on Z_n^k (flattened, first index fastest).
TTStarResult ttstar_check(int n, int k, const std::vector<cplx>& m, int restarts, std::uint64_t seed);

}  // namespace kdv5
