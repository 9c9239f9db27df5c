#include "kdv5/spectral_core.hpp"

#include <algorithm>
#include <limits>

#include "fft.hpp"

namespace kdv5 {

FrequencyGrid::FrequencyGrid(double delta_xi, int half_extent)
    : delta_(delta_xi), half_extent_(half_extent) {
  if (!(delta_xi > 0.0)) throw InvalidInput("FrequencyGrid: delta_xi must be positive");
  if (half_extent < 1) throw InvalidInput("FrequencyGrid: half extent must be >= 1");
}

SpectralField::SpectralField(FrequencyGrid g, std::vector<cplx> v, bool herm)
    : grid(g), values(std::move(v)), hermitian(herm) {
  if (values.size() != grid.size()) throw InvalidInput("SpectralField: value count != 2M+1");
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double SpectralField::hermitian_defect() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  const std::size_t n = values.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(values[n - 1 - i] - std::conj(values[i])));
  }
  return worst / scale;
}

SpaceTimeGrid::SpaceTimeGrid(FrequencyGrid xi, double dtau, int tau_half)
    : xi_axis(xi), delta_tau(dtau), tau_half_extent(tau_half) {
  if (!(dtau > 0.0)) throw InvalidInput("SpaceTimeGrid: delta_tau must be positive");
  if (tau_half < 0) throw InvalidInput("SpaceTimeGrid: tau half extent must be >= 0");
}

PeriodicGrid::PeriodicGrid(double length, int n) : length_(length), n_(n) {
  if (!(length > 0.0)) throw InvalidInput("PeriodicGrid: length must be positive");
  if (n < 8 || (n & (n - 1)) != 0) {
    throw InvalidInput("PeriodicGrid: n must be a power of two >= 8");
  }
}

cplx BandSpectrum::value(double xi) const {
  cplx v = 0.0;
  for (const auto& b : bands) {
    if (xi >= b.lo && xi <= b.hi) v += b.amp;
  }
  return v;
}

std::vector<double> BandSpectrum::breakpoints() const {
  std::vector<double> pts;
  pts.reserve(2 * bands.size());
  for (const auto& b : bands) {
    pts.push_back(b.lo);
    pts.push_back(b.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double BandSpectrum::mass_squared() const {
  // Bands in one spectrum do not overlap.
  double m = 0.0;
  for (const auto& b : bands) m += std::norm(b.amp) * (b.hi - b.lo);
  return m;
}

namespace {

SpectralField forward_impl(std::vector<cplx> work, const PeriodicGrid& grid) {
  const int n = grid.n();
  detail::fft_inplace(work, -1);
  const double dx = grid.dx();
  const int half = n / 2;
  SpectralField out(grid.frequency_grid());
  for (int m = -half; m <= half; ++m) {
    const int k = ((m % n) + n) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    cplx v = dx * sign * work[static_cast<std::size_t>(k)];
    if (m == half || m == -half) v *= 0.5;
    out.values[out.grid.index_of_mode(m)] = v;
  }
  return out;
}

}  // namespace

SpectralField forward_transform(std::span<const double> u, const PeriodicGrid& grid) {
  if (static_cast<int>(u.size()) != grid.n()) {
    throw InvalidInput("forward_transform: sample count does not match grid");
  }
  std::vector<cplx> work(u.begin(), u.end());
  auto out = forward_impl(std::move(work), grid);
  out.hermitian = true;
  return out;
}

SpectralField forward_transform(std::span<const cplx> u, const PeriodicGrid& grid) {
  if (static_cast<int>(u.size()) != grid.n()) {
    throw InvalidInput("forward_transform: sample count does not match grid");
  }
  return forward_impl(std::vector<cplx>(u.begin(), u.end()), grid);
}

std::vector<cplx> inverse_transform(const SpectralField& f, const PeriodicGrid& grid) {
  const int n = grid.n();
  if (!(f.grid == grid.frequency_grid())) {
    throw InvalidInput("inverse_transform: spectrum grid does not match periodic grid");
  }
  const int half = n / 2;
  std::vector<cplx> work(static_cast<std::size_t>(n), cplx(0.0));
  for (int m = -half; m <= half; ++m) {
    const int k = ((m % n) + n) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    work[static_cast<std::size_t>(k)] += sign * f.values[f.grid.index_of_mode(m)];
  }
  detail::fft_inplace(work, +1);
  const double scale = 1.0 / grid.length();
  for (auto& w : work) w *= scale;
  return work;
}

cplx transform_at(std::span<const double> u, const PeriodicGrid& grid, double xi) {
  if (static_cast<int>(u.size()) != grid.n()) {
    throw InvalidInput("transform_at: sample count does not match grid");
  }
  cplx sum = 0.0;
  for (int j = 0; j < grid.n(); ++j) sum += u[static_cast<std::size_t>(j)] * std::polar(1.0, -xi * grid.x(j));
  return grid.dx() * sum;
}

std::vector<double> inverse_transform_real(const SpectralField& f, const PeriodicGrid& grid) {
  const auto c = inverse_transform(f, grid);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

SpectralField apply_propagator(const SpectralField& f, double t) {
  SpectralField out = f;
  if (t == 0.0) return out;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double xi = f.grid.xi(i);
    const double x2 = xi * xi;
    out.values[i] *= std::polar(1.0, t * x2 * x2 * xi);
  }
  return out;
}

double projector_symbol(double xi, double a) {
  const double ax = std::abs(xi);
  if (ax > 1.0) return 0.0;
  if (ax == 0.0) {
    if (a > 0.0) return 0.0;
    if (a == 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(ax, a);
}

SpectralField apply_projector_P(const SpectralField& f, double a) {
  SpectralField out = f;
  const double d = f.grid.delta();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double xi = f.grid.xi(i);
    if (std::abs(xi) > 1.0) {
      out.values[i] = 0.0;
    } else if (xi == 0.0) {
      if (out.values[i] == cplx(0.0)) continue;
      const double avg = a > -1.0 ? std::pow(0.5 * d, a) / (a + 1.0)
                                  : std::numeric_limits<double>::infinity();
      out.values[i] *= avg;
    } else {
      out.values[i] *= std::pow(std::abs(xi), a);
    }
  }
  return out;
}

double smooth_cutoff(double t) {
  const double at = std::abs(t);
  if (at <= 1.0) return 1.0;
  if (at >= 2.0) return 0.0;
  const double c = std::cos(0.5 * kPi * (at - 1.0));
  return c * c;
}

SpectralField convolve_spectra(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid == g.grid)) throw InvalidInput("convolve_spectra: grid mismatch");
  const int M = f.grid.half_extent();
  const std::size_t n_in = f.values.size();
  const std::size_t n_out = 2 * n_in - 1;
  const int padded = detail::next_fast_size(static_cast<int>(n_out));
  std::vector<cplx> a(static_cast<std::size_t>(padded), cplx(0.0));
  std::vector<cplx> b(static_cast<std::size_t>(padded), cplx(0.0));
  std::copy(f.values.begin(), f.values.end(), a.begin());
  std::copy(g.values.begin(), g.values.end(), b.begin());
  detail::fft_inplace(a, -1);
  detail::fft_inplace(b, -1);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  detail::fft_inplace(a, +1);
  const double scale = f.grid.delta() / padded;
  SpectralField out(FrequencyGrid(f.grid.delta(), 2 * M), f.hermitian && g.hermitian);
  for (std::size_t i = 0; i < n_out; ++i) out.values[i] = a[i] * scale;
  return out;
}

SpectralField to_field(const BandSpectrum& bands, const FrequencyGrid& grid) {
  const double d = grid.delta();
  for (const auto& b : bands.bands) {
    if (b.hi - b.lo < d) {
      throw InvalidResolution("to_field: band narrower than one grid cell");
    }
  }
  SpectralField out(grid, bands.hermitian);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double lo = grid.xi(i) - 0.5 * d;
    const double hi = grid.xi(i) + 0.5 * d;
    cplx v = 0.0;
    for (const auto& b : bands.bands) {
      const double overlap = std::min(hi, b.hi) - std::max(lo, b.lo);
      if (overlap > 0.0) v += b.amp * (overlap / d);
    }
    out.values[i] = v;
  }
  return out;
}

}  // namespace kdv5
