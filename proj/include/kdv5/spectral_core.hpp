#pragma once

// Grids, Fourier conventions, the free propagator e^{t d_x^5}, frequency
// projectors and the smooth time cutoff.
//
// Conventions: u^(xi) = \int u(x) e^{-i xi x} dx, so that products become
// (uv)^ = (1/2pi) u^ * v^. Discrete sums carry their cell measure so grid
// norms approximate the continuum integrals.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kdv5/errors.hpp"

namespace kdv5 {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Japanese bracket <x> = (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Symmetric uniform frequency grid xi_m = m * delta_xi, |m| <= M.
class FrequencyGrid {
 public:
  FrequencyGrid(double delta_xi, int half_extent);

  double delta() const { return delta_; }
  int half_extent() const { return half_extent_; }
  std::size_t size() const { return static_cast<std::size_t>(2 * half_extent_ + 1); }
  /// Frequency of storage index i (i = 0 is xi = -M * delta).
  double xi(std::size_t i) const {
    return (static_cast<double>(i) - half_extent_) * delta_;
  }
  std::size_t index_of_mode(int m) const { return static_cast<std::size_t>(m + half_extent_); }

  bool operator==(const FrequencyGrid& o) const {
    return delta_ == o.delta_ && half_extent_ == o.half_extent_;
  }

 private:
  double delta_;
  int half_extent_;
};

/// Complex amplitudes u^(xi) on a FrequencyGrid.
struct SpectralField {
  FrequencyGrid grid;
  std::vector<cplx> values;
  bool hermitian = false;

  explicit SpectralField(FrequencyGrid g, bool herm = false)
      : grid(g), values(g.size()), hermitian(herm) {}
  SpectralField(FrequencyGrid g, std::vector<cplx> v, bool herm = false);

  /// Max |u^(-xi) - conj(u^(xi))| relative to max |u^|.
  double hermitian_defect() const;
  double max_abs() const;
};

/// Uniform (tau, xi) grid; values are stored tau-major: index = it * nxi + ix.
struct SpaceTimeGrid {
  FrequencyGrid xi_axis;
  double delta_tau;
  int tau_half_extent;

  SpaceTimeGrid(FrequencyGrid xi, double dtau, int tau_half);

  std::size_t n_tau() const { return static_cast<std::size_t>(2 * tau_half_extent + 1); }
  std::size_t n_xi() const { return xi_axis.size(); }
  double tau(std::size_t it) const {
    return (static_cast<double>(it) - tau_half_extent) * delta_tau;
  }
  double xi(std::size_t ix) const { return xi_axis.xi(ix); }
  double cell_area() const { return delta_tau * xi_axis.delta(); }

  bool operator==(const SpaceTimeGrid& o) const {
    return xi_axis == o.xi_axis && delta_tau == o.delta_tau &&
           tau_half_extent == o.tau_half_extent;
  }
};

struct SpaceTimeField {
  SpaceTimeGrid grid;
  std::vector<cplx> values;

  explicit SpaceTimeField(SpaceTimeGrid g) : grid(g), values(g.n_tau() * g.n_xi()) {}

  cplx& at(std::size_t it, std::size_t ix) { return values[it * grid.n_xi() + ix]; }
  const cplx& at(std::size_t it, std::size_t ix) const { return values[it * grid.n_xi() + ix]; }
};

/// Collocation grid for the periodic box [-L/2, L/2) standing in for the line.
class PeriodicGrid {
 public:
  PeriodicGrid(double length, int n);

  double length() const { return length_; }
  int n() const { return n_; }
  double dx() const { return length_ / n_; }
  double x(int j) const { return -0.5 * length_ + j * dx(); }
  double wavenumber_step() const { return 2.0 * kPi / length_; }
  /// FrequencyGrid of the discrete spectrum: delta = 2pi/L, M = n/2.
  FrequencyGrid frequency_grid() const { return FrequencyGrid(wavenumber_step(), n_ / 2); }

 private:
  double length_;
  int n_;
};

/// Piecewise-constant spectrum: a finite list of bands with complex amplitude.
struct Band {
  double lo;
  double hi;
  cplx amp;
};

struct BandSpectrum {
  std::vector<Band> bands;
  bool hermitian = false;

  cplx value(double xi) const;
  /// Sorted band endpoints.
  std::vector<double> breakpoints() const;
  /// \int |u^|^2 over all bands (closed form).
  double mass_squared() const;
};

/// Discretized u^ = (L/n) sum_j u_j e^{-i xi x_j}; the Nyquist coefficient is
/// split evenly between xi = +-n/2.
SpectralField forward_transform(std::span<const double> u, const PeriodicGrid& grid);
SpectralField forward_transform(std::span<const cplx> u, const PeriodicGrid& grid);
std::vector<cplx> inverse_transform(const SpectralField& f, const PeriodicGrid& grid);
/// The same discrete sum evaluated at an arbitrary frequency (direct O(n)).
cplx transform_at(std::span<const double> u, const PeriodicGrid& grid, double xi);
/// Real part of the inverse transform; the caller owns the Hermitian check.
std::vector<double> inverse_transform_real(const SpectralField& f, const PeriodicGrid& grid);

/// Free propagator: multiplies each mode by e^{i t xi^5}.
SpectralField apply_propagator(const SpectralField& f, double t);

/// Multiplier |xi|^a chi_{|xi|<=1}. The xi = 0 node carries the cell-averaged
/// weight; for a <= -1 that average diverges and nonzero data there become inf.
SpectralField apply_projector_P(const SpectralField& f, double a);
double projector_symbol(double xi, double a);

/// Cosine taper: 1 on |t| <= 1, cos^2(pi(|t|-1)/2) on 1 < |t| < 2, 0 beyond.
double smooth_cutoff(double t);

/// Linear convolution h(xi) = \int f(xi1) g(xi - xi1) dxi1 on a shared grid,
/// computed with zero-padded FFTs; the result lives on the grid with half
/// extent 2M. Trapezoid weights (delta) are included.
SpectralField convolve_spectra(const SpectralField& f, const SpectralField& g);

/// Sample a band spectrum onto a grid with cell-coverage weights.
SpectralField to_field(const BandSpectrum& bands, const FrequencyGrid& grid);

}  // namespace kdv5
