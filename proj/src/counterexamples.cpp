#include "kdv5/counterexamples.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace kdv5 {

void ShearedRect::validate() const {
  if (!(xi_halfwidth > 0.0) || !(tau_halfheight > 0.0)) {
    throw InvalidInput("ShearedRect: half extents must be positive");
  }
}

bool ShearedRect::contains(double tau, double xi) const {
  return std::abs(xi - xi_center) <= xi_halfwidth &&
         std::abs(tau - (shear_slope * xi + shear_offset)) <= tau_halfheight;
}

ShearedRect ShearedRect::reflected() const {
  ShearedRect r = *this;
  r.xi_center = -xi_center;
  r.shear_offset = -shear_offset;
  return r;
}

bool RectSpectrum::common_shear() const {
  for (const auto& r : rects) {
    if (r.shear_slope != rects.front().shear_slope) return false;
  }
  return true;
}

cplx RectSpectrum::value(double tau, double xi) const {
  cplx v = 0.0;
  for (const auto& r : rects) {
    if (r.contains(tau, xi)) v += r.amplitude;
  }
  return v;
}

AppendixRects appendix_rects(double N) {
  if (!(N >= 4.0)) throw InvalidInput("appendix_rects: N >= 4 required");
  const double w = std::pow(N, -1.5);
  const double c = 5.0 * std::pow(N, 4);
  const double n5 = std::pow(N, 5);
  AppendixRects a;
  a.P1 = {N, w, c, -4.0 * n5, 0.5, 1.0};
  a.P2 = a.P1.reflected();
  a.Q = {2.0 * w, w, c, 0.0, 0.5, 1.0};
  a.R1 = {0.625 * w, 0.125 * w, c, 0.0, 0.5, 1.0};
  a.R2 = {N, 0.25 * w, c, -4.0 * n5, 0.5, 1.0};
  a.R3 = {2.0 * N, 0.5 * w, c, -8.0 * n5, 0.5, 1.0};
  a.R2_shifted = a.R2;
  a.R2_shifted.xi_center = a.P1.xi_center + a.Q.xi_center;
  return a;
}

BandSpectrum phi_n_c2(double N, double s) {
  if (!(N >= 4.0)) throw InvalidInput("phi_n_c2: N >= 4 required");
  const double g = std::pow(N, -4);
  BandSpectrum b;
  b.bands.push_back({N - g, N + g, std::pow(N, 2.0 - s)});
  b.bands.push_back({0.5 * g, g, N * N});
  return b;
}

BandSpectrum phi_n_delta(double N, double delta, double a) {
  if (!(N >= 4.0)) throw InvalidInput("phi_n_delta: N >= 4 required");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("phi_n_delta: delta in (0, 1]");
  const double g = std::pow(N, -4);
  const double amp = delta * std::pow(N, 2.0 * a + 4.0);
  BandSpectrum b;
  b.bands.push_back({-N - g, -N + g, amp});
  b.bands.push_back({N - g, N + g, amp});
  b.hermitian = true;
  return b;
}

BandSpectrum psi_n(double N, double s, double a) {
  if (!(N >= 4.0)) throw InvalidInput("psi_n: N >= 4 required");
  const double g = std::pow(N, -4);
  const double high = std::pow(N, 2.0 - s);
  BandSpectrum b;
  b.bands.push_back({-N - g, -N + g, high});
  b.bands.push_back({0.5 * g, 1.5 * g, std::pow(N, 4.0 * a + 2.0)});
  b.bands.push_back({N - g, N + g, high});
  return b;
}

BandSpectrum phi_n_cubic(double N, double s) {
  if (!(N >= 4.0)) throw InvalidInput("phi_n_cubic: N >= 4 required");
  const double w = std::pow(N, -1.5);
  const double amp = std::pow(N, 0.75 - s);
  BandSpectrum b;
  b.bands.push_back({-N - w, -N + w, amp});
  b.bands.push_back({N - w, N + w, amp});
  b.hermitian = true;
  return b;
}

BandSpectrum hermitian_completion(const BandSpectrum& in) {
  BandSpectrum out = in;
  for (const auto& b : in.bands) out.bands.push_back({-b.hi, -b.lo, std::conj(b.amp)});
  out.hermitian = true;
  return out;
}

GrowthFit growth_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InvalidInput("growth_fit: at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (auto [N, v] : points) {
    if (!(v > 0.0) || !(N > 0.0)) throw InvalidInput("growth_fit: values must be positive");
    const double x = std::log(N), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 1e-12 * n * sxx)) throw InvalidInput("growth_fit: N values must differ");
  GrowthFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double r2 = 0.0;
  for (auto [N, v] : points) {
    const double e = std::log(v) - (f.intercept + f.slope * std::log(N));
    r2 += e * e;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

void write_bands(std::ostream& os, const BandSpectrum& b) {
  os << "# xi_lo xi_hi re_amp im_amp\n";
  if (b.hermitian) os << "hermitian 1\n";
  os << std::setprecision(17);
  for (const auto& band : b.bands) {
    os << band.lo << ' ' << band.hi << ' ' << band.amp.real() << ' ' << band.amp.imag() << '\n';
  }
}

BandSpectrum read_bands(std::istream& is) {
  BandSpectrum b;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (line.compare(first, 9, "hermitian") == 0) {
      std::string key;
      int flag = 0;
      ls >> key >> flag;
      b.hermitian = flag != 0;
      continue;
    }
    double lo, hi, re, im;
    if (!(ls >> lo >> hi >> re >> im) || !(hi > lo)) {
      throw InvalidInput("read_bands: bad band on line " + std::to_string(lineno));
    }
    b.bands.push_back({lo, hi, cplx(re, im)});
  }
  return b;
}

}  // namespace kdv5
