#pragma once

// Pseudospectral integration of
//   u_t - u_xxxxx + c1 (u^3)_x + c2 ((u_x)^2)_x + c3 (u u_xx)_x = 0
// on a periodic box, with conservation monitors, the a-priori bound check and
// the scaling transform.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kdv5/duhamel.hpp"
#include "kdv5/norms.hpp"
#include "kdv5/spectral_core.hpp"

namespace kdv5 {

struct SolverConfig {
  PeriodicGrid grid{2.0 * kPi, 64};
  double dt = 1e-4;
  double T = 1e-2;
  Coefficients coeffs = Coefficients::unchecked(0.0, 0.0, 0.0);
  int dealias_pad = 2;
  /// alpha of the H^1 functional monitor (the preset's alpha).
  double alpha = 0.0;
  /// a of the H^{1,a} monitor.
  double monitor_a = -0.5;
  /// Monitors and snapshots every this many steps (the final state is always kept).
  int monitor_every = 1;

  /// Throws InvalidInput unless dt > 0, T >= dt, pad >= 2, monitor_every >= 1.
  void validate() const;
};

struct Trajectory {
  PeriodicGrid grid{2.0 * kPi, 64};
  double monitor_a = -0.5;
  std::vector<double> t;
  std::vector<std::vector<double>> states;
  std::vector<double> l2;
  std::vector<double> h1_functional;
  std::vector<double> h1a_norm;  // inf where the norm diverges
  /// max over the run of max|Im u| / max|u| before the real part is taken.
  double imag_residue = 0.0;
  /// Set when the spectral tail rose above 1e-6 of the peak.
  bool accuracy_warning = false;
  std::string warning;
  int steps = 0;
  double dt = 0.0;  // step actually used: T / steps
};

/// Integrating-factor RK4: the linear flow e^{it xi^5} is exact, the
/// nonlinearity is evaluated on a grid padded by cfg.dealias_pad.
/// InvalidInput on a size mismatch or non-real data, InvalidResolution when the
/// initial spectral tail exceeds 1e-10 of the peak, AbortedRun when the L^2
/// norm grows by more than 1e6.
Trajectory evolve(std::span<const double> u0, const SolverConfig& cfg);

/// |l2(t) - l2(0)| / l2(0) for each monitored time.
std::vector<double> conserved_l2(const Trajectory& traj);
/// |H(t) - H(0)| / max(|H(0)|, ||u_x(0)||^2) for the H^1 functional.
std::vector<double> h1_functional_drift(const Trajectory& traj);

/// \int u_x^2 + (2/5) alpha u^3 dx, the cubic integral on a doubled grid.
double h1_functional(std::span<const double> u, const PeriodicGrid& grid, double alpha);
double l2_norm(std::span<const double> u, const PeriodicGrid& grid);

struct AprioriResult {
  double lhs = 0.0;          // sup_t ||u(t)||^2_{H^{1,a}}
  double rhs_bracket = 0.0;  // ||u0||^2_{H^{1,a}} + ||u0||^{10/3} + T^{4/3}(...)
  double ratio = 0.0;        // 0 for u0 = 0
  bool divergent = false;
};

/// The bracket uses the T argument; lhs is the sup over the stored states.
AprioriResult apriori_check(const Trajectory& traj, double a, double T);
double apriori_bracket(std::span<const double> u0, const PeriodicGrid& grid, double a, double T);

struct ScaledData {
  PeriodicGrid grid;
  std::vector<double> u;
};

/// lambda^-2 u0(x / lambda) on the box lambda L with the same n: the samples
/// are rescaled in place. InvalidInput for lambda < 1, InvalidResolution when
/// u0 does not match the grid.
ScaledData scaling_transform(std::span<const double> u0, const PeriodicGrid& grid, double lambda);

struct ScalingCheck {
  double lhs = 0.0;  // ||u_lambda(0)||_{H^{s,a}}
  double rhs = 0.0;  // lambda^{-3/2-a} ||u0||_{H^{s,a}}
  bool holds = false;
};

ScalingCheck scaling_check(std::span<const double> u0, const PeriodicGrid& grid, double s, double a,
                           double lambda);

/// x -> -x on the grid x_j = -L/2 + j dx (j -> n - j mod n).
std::vector<double> reflect(std::span<const double> u);

/// Sum of three random bumps c (x - x0)/w e^{-((x - x0)/w)^2}, |c| <= amplitude,
/// w in [1, 2], |x0| <= L/8. Each bump has zero mean, so H^{s,a} norms with
/// a > -3/2 stay finite.
std::vector<double> random_smooth_data(const PeriodicGrid& grid, std::uint64_t seed, double amplitude = 0.3);

/// Samples of a function on the grid.
template <class F>
std::vector<double> sample(const PeriodicGrid& grid, F&& f) {
  std::vector<double> u(static_cast<std::size_t>(grid.n()));
  for (int j = 0; j < grid.n(); ++j) u[static_cast<std::size_t>(j)] = f(grid.x(j));
  return u;
}

}  // namespace kdv5
