#pragma once

// Weighted Sobolev and Bourgain-type norms, dyadic shells and the
// low-frequency regions D1/D2.

#include <cstdint>
#include <limits>
#include <optional>

#include "kdv5/spectral_core.hpp"

namespace kdv5 {

/// Norm value or the marker that the weighted integral diverges at xi = 0.
struct NormValue {
  double value = 0.0;
  bool divergent = false;

  static NormValue diverges() { return {std::numeric_limits<double>::infinity(), true}; }
};

struct WeightParams {
  double s = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> eps1;
  std::optional<double> eps2;

  /// eps1, falling back to (s + 1/4) / 2.
  double eps1_or_default() const { return eps1 ? *eps1 : 0.5 * (s + 0.25); }
  /// eps2, falling back to -(a + 7/8) / 2.
  double eps2_or_default() const { return eps2 ? *eps2 : -0.5 * (a + 0.875); }
};

struct DyadicIndex {
  int j = 0;
  int k = 0;
  bool operator==(const DyadicIndex&) const = default;
};

enum class NormKind { Hsa, Xsab, X21, XLab, XLab1, XLa, Zsa, DualL2L1 };
const char* to_string(NormKind k);

enum class Region { D1, D2, High };
const char* to_string(Region r);

/// j = floor(log2 <xi>), k = floor(log2 <tau - xi^5>).
DyadicIndex dyadic_index(double tau, double xi);
int dyadic_shell(double x);

/// D1 when |tau| >= |xi|^{-5/3}, D2 otherwise, for |xi| <= 1; xi = 0 is D2.
Region region_classify(double tau, double xi);

/// ||<xi>^{s-a} |xi|^a u^||_{L^2}; midpoint weights, the origin cell uses the
/// exact cell average of |xi|^{2a}.
NormValue h_sa_norm(const SpectralField& f, double s, double a);
/// Same norm of a piecewise-constant spectrum, by adaptive quadrature per band.
NormValue h_sa_norm(const BandSpectrum& f, double s, double a);

/// Weight <xi>^{2(s-a)} |xi|^{2a} averaged over the grid cell centred at xi
/// (plain point value away from the origin); +inf when the origin average diverges.
double cell_weight_sq(double xi, double delta_xi, double s, double a);

NormValue xsab_norm(const SpaceTimeField& f, double s, double a, double b);
double x21_norm(const SpaceTimeField& f, double s);
/// Weighted L^2 over A_0 = {|xi| <= 1} of |xi|^a <tau - xi^5>^b f.
NormValue xl_ab_norm(const SpaceTimeField& f, double a, double b);
/// sum_k 2^{bk} || |xi|^a f ||_{L^2(A_0 cap B_k)}.
NormValue xl_ab1_norm(const SpaceTimeField& f, double a, double b);
/// Four-branch low-frequency norm; requires -3/2 < a <= -1/4.
NormValue xl_a_norm(const SpaceTimeField& f, const WeightParams& p);
/// Branch exponent used by xl_a_norm for a given a (in the l^1 or L^2 form).
double xl_a_exponent(const WeightParams& p);
NormValue z_norm(const SpaceTimeField& f, const WeightParams& p);
NormValue dual_l2l1_norm(const SpaceTimeField& f, double s, double a);

/// Restriction to |xi| >= 1 (p_h) and |xi| <= 1 (p_l); both keep |xi| = 1.
SpaceTimeField restrict_high(const SpaceTimeField& f);
SpaceTimeField restrict_low(const SpaceTimeField& f);

/// s >= max{-1/4, -2a-2}, -3/2 < a <= -1/4, (s,a) != (-1/4,-7/8).
bool admissible(double s, double a);
inline double s_threshold(double a) { return -2.0 * a - 2.0; }

/// Random test field: a few constant blocks that follow the curve
/// tau = xi^5 + sigma, sigma log-uniform in +-[1, max_modulation], the
/// origin column kept empty.
SpaceTimeField random_modulated_blocks(const SpaceTimeGrid& g, std::uint64_t seed, double max_modulation);

struct EmbeddingFit {
  double upper = 0.0;  // max ||f||_Z / ||f||_{X^{s,a,3/4+eps}}
  double lower = 0.0;  // max ||f||_{X^{s,a,3/8}} / ||f||_Z
  int samples = 0;
};

/// Sampled constants of the chain X^{s,a,3/4+eps} -> Z^{s,a} -> X^{s,a,3/8}
/// over `count` fields random_modulated_blocks(g, seed + i, max_modulation).
EmbeddingFit embedding_chain_fit(const SpaceTimeGrid& g, const WeightParams& p, double eps, int count,
                                 std::uint64_t seed, double max_modulation);

}  // namespace kdv5
