#include "kdv5/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fft.hpp"
#include "kdv5/quadrature.hpp"

namespace kdv5 {

namespace {

constexpr double kQuadRel = 1e-7;
constexpr int kQuadPanels = 2000;

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Points of `extra` strictly inside (lo, hi), with lo and hi, sorted.
std::vector<double> cut_points(double lo, double hi, const std::vector<double>& extra) {
  std::vector<double> pts{lo, hi};
  for (double x : extra) {
    if (x > lo && x < hi) pts.push_back(x);
  }
  return sorted_unique(pts);
}

double frequency_weight_sq(double xi, double s, double a) {
  if (xi == 0.0) return a == 0.0 ? 1.0 : (a > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return std::pow(bracket(xi), 2.0 * (s - a)) * std::pow(std::abs(xi), 2.0 * a);
}

// tau - xi^5 at (sigma0 + z, xi0 + y) for the shear tau = sigma + c xi, expanded
// about xi0 so that the large terms cancel once.
struct Modulation {
  double base;  // sigma0 + c xi0 - xi0^5
  double lin;   // c - 5 xi0^4
  double x0;

  Modulation(double c, double xi0, double sigma0) : x0(xi0) {
    const long double x = xi0, x2 = x * x;
    base = static_cast<double>(static_cast<long double>(sigma0) + static_cast<long double>(c) * x - x2 * x2 * x);
    lin = static_cast<double>(static_cast<long double>(c) - 5.0L * x2 * x2);
  }
  // The z-independent part.
  double at(double y) const {
    const double x = x0;
    return base + y * (lin - y * (10.0 * x * x * x + y * (10.0 * x * x + y * (5.0 * x + y))));
  }
};

// Zeros of y -> m.at(y) + shift in [lo, hi], by sampling and bisection.
std::vector<double> modulation_zeros(const Modulation& m, double shift, double lo, double hi) {
  std::vector<double> out;
  constexpr int kSamples = 64;
  double ya = lo, fa = m.at(lo) + shift;
  for (int i = 1; i <= kSamples; ++i) {
    const double yb = lo + (hi - lo) * i / kSamples;
    const double fb = m.at(yb) + shift;
    if ((fa < 0.0) != (fb < 0.0)) {
      double l = ya, r = yb, fl = fa;
      for (int it = 0; it < 200 && r - l > 0.0; ++it) {
        const double mid = 0.5 * (l + r);
        if (!(mid > l && mid < r)) break;
        const double fm = m.at(mid) + shift;
        if ((fm < 0.0) == (fl < 0.0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      out.push_back(0.5 * (l + r));
    }
    ya = yb;
    fa = fb;
  }
  return out;
}

// int over [zlo, zhi] of g(z) <m0 + z>^{2b}, split at the kinks and at m0 + z = 0.
template <class G>
double sigma_integral(const G& g, double m0, double b, const std::vector<double>& zcuts) {
  std::vector<double> extra = zcuts;
  extra.push_back(-m0);
  const auto pts = cut_points(zcuts.front(), zcuts.back(), extra);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto f = [&](double z) { return g(z) * std::pow(bracket(m0 + z), 2.0 * b); };
    sum += integrate_gk(f, pts[i], pts[i + 1], kQuadRel, 0.0, kQuadPanels);
  }
  return sum;
}

// int dy over y-cuts of F(y), splitting also where the modulation ridge crosses.
template <class F>
double xi_integral(const F& f, const Modulation& mod, double sigma_mid_offset, std::vector<double> ycuts,
                   double y_origin) {
  const double lo = ycuts.front(), hi = ycuts.back();
  for (double z : modulation_zeros(mod, sigma_mid_offset, lo, hi)) ycuts.push_back(z);
  ycuts.push_back(y_origin);
  const auto pts = cut_points(lo, hi, ycuts);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    sum += integrate_gk(f, pts[i], pts[i + 1], kQuadRel, 0.0, kQuadPanels);
  }
  return sum;
}

SpaceTimeField resize_st(const SpaceTimeField& f, int m, int t) {
  SpaceTimeField out(SpaceTimeGrid(FrequencyGrid(f.grid.xi_axis.delta(), m), f.grid.delta_tau, t));
  const int mi = f.grid.xi_axis.half_extent(), ti = f.grid.tau_half_extent;
  for (int it = -ti; it <= ti; ++it) {
    for (int ix = -mi; ix <= mi; ++ix) {
      out.at(static_cast<std::size_t>(it + t), static_cast<std::size_t>(ix + m)) =
          f.at(static_cast<std::size_t>(it + ti), static_cast<std::size_t>(ix + mi));
    }
  }
  return out;
}

// Fraction of the cell [c - h/2, c + h/2] inside [-w, w].
// Fraction of the cell [c - h/2, c + h/2] inside [lo, hi].
double coverage(double c, double h, double lo, double hi) {
  const double o = std::min(c + 0.5 * h, hi) - std::max(c - 0.5 * h, lo);
  return std::clamp(o / h, 0.0, 1.0);
}

}  // namespace

double BoxProfile::operator()(double x) const {
  const double lo = std::max(a1, x - b2);
  const double hi = std::min(b1, x - a2);
  if (!(hi > lo)) return 0.0;
  if (moment == 0) return hi - lo;
  return (hi - lo) * (hi * hi + hi * lo + lo * lo) / 3.0;
}

std::vector<double> BoxProfile::kinks() const {
  return sorted_unique({a1 + a2, a1 + b2, b1 + a2, b1 + b2});
}

cplx PiecewiseBilinearSurface::value_sheared(double sigma, double xi) const {
  cplx v = 0.0;
  for (const auto& t : terms) {
    const double px = t.xi(xi);
    if (px == 0.0) continue;
    v += t.amp * px * t.sigma(sigma);
  }
  return v;
}

cplx PiecewiseBilinearSurface::value(double tau, double xi) const {
  return value_sheared(tau - shear_slope * xi, xi);
}

std::vector<double> PiecewiseBilinearSurface::xi_kinks() const {
  std::vector<double> v;
  for (const auto& t : terms) {
    const auto k = t.xi.kinks();
    v.insert(v.end(), k.begin(), k.end());
  }
  return sorted_unique(v);
}

std::vector<double> PiecewiseBilinearSurface::sigma_kinks() const {
  std::vector<double> v;
  for (const auto& t : terms) {
    const auto k = t.sigma.kinks();
    v.insert(v.end(), k.begin(), k.end());
  }
  return sorted_unique(v);
}

PiecewiseBilinearSurface convolve_exact(const RectSpectrum& f, const RectSpectrum& g, int xi_moment) {
  if (xi_moment != 0 && xi_moment != 2) throw InvalidInput("convolve_exact: xi_moment must be 0 or 2");
  PiecewiseBilinearSurface out;
  if (f.rects.empty() || g.rects.empty()) return out;
  out.shear_slope = f.rects.front().shear_slope;
  for (const auto* spec : {&f, &g}) {
    for (const auto& r : spec->rects) {
      r.validate();
      if (r.shear_slope != out.shear_slope) {
        throw InvalidInput("convolve_exact: rectangles do not share a shear; rasterize and use convolve_grid");
      }
    }
  }
  for (const auto& p : f.rects) {
    for (const auto& q : g.rects) {
      SurfaceTerm t;
      t.amp = p.amplitude * q.amplitude;
      t.xi = {p.xi_lo(), p.xi_hi(), q.xi_lo(), q.xi_hi(), xi_moment};
      t.sigma = {p.shear_offset - p.tau_halfheight, p.shear_offset + p.tau_halfheight,
                 q.shear_offset - q.tau_halfheight, q.shear_offset + q.tau_halfheight, 0};
      out.terms.push_back(t);
    }
  }
  return out;
}

double min_over(const PiecewiseBilinearSurface& s, const ShearedRect& r) {
  if (r.shear_slope != s.shear_slope) throw InvalidInput("min_over: region shear differs from the surface");
  const auto xs = cut_points(r.xi_lo(), r.xi_hi(), s.xi_kinks());
  const auto ss = cut_points(r.shear_offset - r.tau_halfheight, r.shear_offset + r.tau_halfheight,
                             s.sigma_kinks());
  double m = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    for (double sg : ss) m = std::min(m, s.value_sheared(sg, x).real());
  }
  return m;
}

SpaceTimeField convolve_grid(const SpaceTimeField& f, const SpaceTimeField& g) {
  if (!(f.grid == g.grid)) throw InvalidInput("convolve_grid: grid mismatch");
  const std::size_t nt = f.grid.n_tau(), nx = f.grid.n_xi();
  const std::size_t pt = static_cast<std::size_t>(detail::next_fast_size(static_cast<int>(2 * nt - 1)));
  const std::size_t px = static_cast<std::size_t>(detail::next_fast_size(static_cast<int>(2 * nx - 1)));

  auto forward = [&](const SpaceTimeField& in) {
    std::vector<cplx> a(pt * px, cplx(0.0));
    std::vector<cplx> row(px);
    for (std::size_t it = 0; it < nt; ++it) {
      std::fill(row.begin(), row.end(), cplx(0.0));
      for (std::size_t ix = 0; ix < nx; ++ix) row[ix] = in.at(it, ix);
      detail::fft_inplace(row, -1);
      std::copy(row.begin(), row.end(), a.begin() + static_cast<std::ptrdiff_t>(it * px));
    }
    std::vector<cplx> col(pt);
    for (std::size_t ix = 0; ix < px; ++ix) {
      for (std::size_t it = 0; it < pt; ++it) col[it] = a[it * px + ix];
      detail::fft_inplace(col, -1);
      for (std::size_t it = 0; it < pt; ++it) a[it * px + ix] = col[it];
    }
    return a;
  };
  auto a = forward(f);
  const auto b = forward(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];

  std::vector<cplx> col(pt);
  for (std::size_t ix = 0; ix < px; ++ix) {
    for (std::size_t it = 0; it < pt; ++it) col[it] = a[it * px + ix];
    detail::fft_inplace(col, +1);
    for (std::size_t it = 0; it < pt; ++it) a[it * px + ix] = col[it];
  }
  SpaceTimeField out(SpaceTimeGrid(FrequencyGrid(f.grid.xi_axis.delta(), 2 * f.grid.xi_axis.half_extent()),
                                   f.grid.delta_tau, 2 * f.grid.tau_half_extent));
  const double scale = f.grid.cell_area() / static_cast<double>(pt * px);
  std::vector<cplx> row(px);
  for (std::size_t it = 0; it < out.grid.n_tau(); ++it) {
    std::copy(a.begin() + static_cast<std::ptrdiff_t>(it * px),
              a.begin() + static_cast<std::ptrdiff_t>((it + 1) * px), row.begin());
    detail::fft_inplace(row, +1);
    for (std::size_t ix = 0; ix < out.grid.n_xi(); ++ix) out.at(it, ix) = row[ix] * scale;
  }
  return out;
}

LocalRaster rasterize(const ShearedRect& r, double d_xi, double d_sigma) {
  r.validate();
  if (!(d_xi > 0.0) || !(d_sigma > 0.0)) throw InvalidInput("rasterize: spacings must be positive");
  // Cell faces start at the lower edges, so spacings dividing the sides give
  // exact 0/1 coverage.
  const int nx = static_cast<int>(std::ceil(2.0 * r.xi_halfwidth / d_xi - 1e-9));
  const int ns = static_cast<int>(std::ceil(2.0 * r.tau_halfheight / d_sigma - 1e-9));
  const int m = (nx + 1) / 2, t = (ns + 1) / 2;
  const double ox = -r.xi_halfwidth + (m + 0.5) * d_xi;
  const double os = -r.tau_halfheight + (t + 0.5) * d_sigma;
  LocalRaster out{r.xi_center + ox, r.shear_offset + os, r.shear_slope,
                  SpaceTimeField(SpaceTimeGrid(FrequencyGrid(d_xi, m), d_sigma, t))};
  const auto& g = out.field.grid;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    const double ct = coverage(g.tau(it), d_sigma, -r.tau_halfheight - os, r.tau_halfheight - os);
    if (ct == 0.0) continue;
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      out.field.at(it, ix) = r.amplitude * ct * coverage(g.xi(ix), d_xi, -r.xi_halfwidth - ox, r.xi_halfwidth - ox);
    }
  }
  return out;
}

LocalRaster convolve_raster(const LocalRaster& f, const LocalRaster& g) {
  const auto& fg = f.field.grid;
  const auto& gg = g.field.grid;
  if (f.shear_slope != g.shear_slope || fg.xi_axis.delta() != gg.xi_axis.delta() ||
      fg.delta_tau != gg.delta_tau) {
    throw InvalidInput("convolve_raster: shear or spacing mismatch");
  }
  const int m = std::max(fg.xi_axis.half_extent(), gg.xi_axis.half_extent());
  const int t = std::max(fg.tau_half_extent, gg.tau_half_extent);
  return {f.xi0 + g.xi0, f.sigma0 + g.sigma0, f.shear_slope,
          convolve_grid(resize_st(f.field, m, t), resize_st(g.field, m, t))};
}

double raster_deviation(const LocalRaster& r, const PiecewiseBilinearSurface& exact) {
  const auto& g = r.field.grid;
  double dev = 0.0, peak = 0.0;
  for (std::size_t it = 0; it < g.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
      const cplx e = exact.value_sheared(r.sigma0 + g.tau(it), r.xi0 + g.xi(ix));
      dev = std::max(dev, std::abs(r.field.at(it, ix) - e));
      peak = std::max(peak, std::abs(e));
    }
  }
  if (peak == 0.0) throw InvalidInput("raster_deviation: exact surface vanishes on the raster");
  return dev / peak;
}

NormValue be3_ratio(const SpaceTimeField& f, const SpaceTimeField& g, double s, double a, double b) {
  SpaceTimeField f2 = f;
  for (std::size_t it = 0; it < f.grid.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < f.grid.n_xi(); ++ix) {
      const double xi = f.grid.xi(ix);
      f2.at(it, ix) *= xi * xi;
    }
  }
  auto h = convolve_grid(f2, g);
  for (std::size_t it = 0; it < h.grid.n_tau(); ++it) {
    for (std::size_t ix = 0; ix < h.grid.n_xi(); ++ix) h.at(it, ix) *= h.grid.xi(ix);
  }
  const auto lhs = xsab_norm(h, s, a, b - 1.0);
  const auto nf = xsab_norm(f, s, a, b);
  const auto ng = xsab_norm(g, s, a, b);
  if (lhs.divergent || nf.divergent || ng.divergent) return NormValue::diverges();
  if (nf.value == 0.0 || ng.value == 0.0) throw InvalidInput("be3_ratio: zero denominator");
  return {lhs.value / (nf.value * ng.value), false};
}

NormValue rect_xsab_norm(const ShearedRect& r, double s, double a, double b) {
  r.validate();
  if (r.xi_lo() <= 0.0 && r.xi_hi() >= 0.0 && 2.0 * a <= -1.0) return NormValue::diverges();
  const Modulation mod(r.shear_slope, r.xi_center, r.shear_offset);
  const std::vector<double> zc{-r.tau_halfheight, r.tau_halfheight};
  auto outer = [&](double y) {
    const double w = frequency_weight_sq(r.xi_center + y, s, a);
    if (w == 0.0) return 0.0;
    return w * sigma_integral([](double) { return 1.0; }, mod.at(y), b, zc);
  };
  const double v = xi_integral(outer, mod, 0.0, {-r.xi_halfwidth, r.xi_halfwidth}, -r.xi_center);
  return {std::abs(r.amplitude) * std::sqrt(v), false};
}

NormValue surface_xsab_norm(const PiecewiseBilinearSurface& h, double s, double a, double b) {
  if (h.terms.empty()) return {0.0, false};
  const auto xk = h.xi_kinks();
  const auto sk = h.sigma_kinks();
  // |xi|^2 |xi|^{2a} near 0: integrable iff 2 + 2a > -1.
  if (xk.front() < 0.0 && xk.back() > 0.0 && 2.0 * a + 2.0 <= -1.0) return NormValue::diverges();
  const double xi0 = 0.5 * (xk.front() + xk.back());
  // sigma offsets are O(N^5): move each sigma profile to local coordinates once,
  // so evaluating at sigma0 + z never rounds sigma0 + z.
  const auto& t0 = h.terms.front().sigma;
  const double sigma0 = 0.5 * (t0.a1 + t0.b1) + 0.5 * (t0.a2 + t0.b2);
  PiecewiseBilinearSurface local = h;
  for (auto& t : local.terms) {
    const double c1 = 0.5 * (t.sigma.a1 + t.sigma.b1), c2 = sigma0 - c1;
    t.sigma = {t.sigma.a1 - c1, t.sigma.b1 - c1, t.sigma.a2 - c2, t.sigma.b2 - c2, t.sigma.moment};
  }
  const Modulation mod(h.shear_slope, xi0, sigma0);
  std::vector<double> yc;
  for (double x : xk) yc.push_back(x - xi0);
  const auto zc = local.sigma_kinks();
  auto outer = [&](double y) {
    const double xi = xi0 + y;
    if (xi == 0.0) return 0.0;
    const double w = xi * xi * frequency_weight_sq(xi, s, a);
    auto g = [&](double z) { return std::norm(local.value_sheared(z, xi)); };
    return w * sigma_integral(g, mod.at(y), b, zc);
  };
  return {std::sqrt(xi_integral(outer, mod, 0.0, yc, -xi0)), false};
}

NormValue be3_ratio(const ShearedRect& f, const ShearedRect& g, double s, double a, double b) {
  const auto h = convolve_exact(RectSpectrum{{f}}, RectSpectrum{{g}}, 2);
  const auto lhs = surface_xsab_norm(h, s, a, b - 1.0);
  const auto nf = rect_xsab_norm(f, s, a, b);
  const auto ng = rect_xsab_norm(g, s, a, b);
  if (lhs.divergent || nf.divergent || ng.divergent) return NormValue::diverges();
  if (nf.value == 0.0 || ng.value == 0.0) throw InvalidInput("be3_ratio: zero denominator");
  return {lhs.value / (nf.value * ng.value), false};
}

const char* to_string(AppendixExample e) {
  switch (e) {
    case AppendixExample::Ex1: return "1";
    case AppendixExample::Ex2: return "2";
    case AppendixExample::Ex3a: return "3a";
    case AppendixExample::Ex3b: return "3b";
  }
  return "?";
}

AppendixExample parse_example(const std::string& id) {
  if (id == "1") return AppendixExample::Ex1;
  if (id == "2") return AppendixExample::Ex2;
  if (id == "3a" || id == "3") return AppendixExample::Ex3a;
  if (id == "3b") return AppendixExample::Ex3b;
  throw InvalidInput("unknown appendix example '" + id + "' (expected 1, 2, 3a or 3b)");
}

ExamplePair example_pair(AppendixExample e, double N) {
  const auto r = appendix_rects(N);
  switch (e) {
    case AppendixExample::Ex1: return {r.P1, r.P2, r.R1};
    case AppendixExample::Ex2: return {r.P1, r.Q, r.R2_shifted};
    case AppendixExample::Ex3a: return {r.P1, r.P1, r.R3};
    case AppendixExample::Ex3b: return {r.R3, r.P2, r.R2};
  }
  throw InvalidInput("example_pair: unknown example");
}

double lower_bound_constant(AppendixExample e, double N) {
  const auto p = example_pair(e, N);
  const auto h = convolve_exact(RectSpectrum{{p.f}}, RectSpectrum{{p.g}});
  return std::pow(N, 1.5) * min_over(h, p.region);
}

SweepResult necessary_condition_sweep(AppendixExample e, double s, double a, const std::vector<double>& b_list,
                                      const std::vector<double>& N_list) {
  if (N_list.size() < 3) throw InvalidInput("necessary_condition_sweep: need >= 3 values of N");
  const auto [mn, mx] = std::minmax_element(N_list.begin(), N_list.end());
  if (*mx < 4.0 * *mn) throw InvalidInput("necessary_condition_sweep: N values must span a factor >= 4");
  SweepResult out;
  out.N = N_list;
  for (double b : b_list) {
    SweepRow row;
    row.b = b;
    std::vector<std::pair<double, double>> pts;
    for (double N : N_list) {
      const auto p = example_pair(e, N);
      const auto r = be3_ratio(p.f, p.g, s, a, b);
      if (r.divergent) throw InvalidInput("necessary_condition_sweep: divergent norm");
      row.ratios.push_back(r.value);
      pts.emplace_back(N, r.value);
    }
    row.slope = growth_fit(pts).slope;
    out.rows.push_back(row);
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const SweepRow& x, const SweepRow& y) { return x.b < y.b; });
  out.crossing = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
    const auto& p = out.rows[i];
    const auto& q = out.rows[i + 1];
    if (p.slope == 0.0) {
      out.crossing = p.b;
      break;
    }
    if ((p.slope < 0.0) != (q.slope < 0.0)) {
      out.crossing = p.b + (q.b - p.b) * p.slope / (p.slope - q.slope);
      break;
    }
  }
  return out;
}

namespace {

// Cell count of {(x, rho): <rho> in B_ka, <sgn rho + c(x)> in B_kb,
// x in [x_lo, x_hi]} on an n x n raster of [x_lo, x_hi] x [-2^{ka+1}, 2^{ka+1}].
template <class C>
double count_strip(double x_lo, double x_hi, int ka, int kb, double sgn, const C& c, int n) {
  if (!(x_hi > x_lo)) return 0.0;
  const double H = std::ldexp(1.0, ka + 1);
  const double hx = (x_hi - x_lo) / n, hr = 2.0 * H / n;
  const double alo = std::sqrt(std::ldexp(1.0, 2 * ka) - 1.0), ahi = std::sqrt(std::ldexp(1.0, 2 * ka + 2) - 1.0);
  const double blo = std::sqrt(std::ldexp(1.0, 2 * kb) - 1.0), bhi = std::sqrt(std::ldexp(1.0, 2 * kb + 2) - 1.0);
  // Row r has centre -H + (r + 1/2) hr; rows with centre in [lo, hi).
  auto rows_in = [&](double lo, double hi) -> long long {
    if (!(hi > lo)) return 0;
    const double r0 = std::ceil((lo + H) / hr - 0.5);
    const double r1 = std::ceil((hi + H) / hr - 0.5);
    const double a = std::max(r0, 0.0), b = std::min(r1, static_cast<double>(n));
    return b > a ? static_cast<long long>(b - a) : 0;
  };
  long long cells = 0;
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (i + 0.5) * hx;
    const double cx = c(x);
    // sgn rho + cx in +-[blo, bhi) -> rho in sgn (+-[blo, bhi) - cx).
    for (int sa : {-1, 1}) {
      const double al = sa > 0 ? alo : -ahi, ah = sa > 0 ? ahi : -alo;
      for (int sb : {-1, 1}) {
        const double bl = sb > 0 ? blo : -bhi, bh = sb > 0 ? bhi : -blo;
        double l = sgn * (bl - cx), h = sgn * (bh - cx);
        if (l > h) std::swap(l, h);
        cells += rows_in(std::max(al, l), std::min(ah, h));
      }
    }
  }
  return static_cast<double>(cells) * hx * hr;
}

// y^2 with (5/16)|phi| y^2 (y^2 + 2 phi^2) = v.
double y_squared(double phi, double v) {
  const double p2 = phi * phi;
  const double r = std::sqrt(p2 * p2 + 16.0 * v / (5.0 * std::abs(phi)));
  // r - p2 without cancellation.
  return (16.0 * v / (5.0 * std::abs(phi))) / (r + p2);
}

// Both measure sets in one form: free frequency x with |2x - phi| >= K, where
// phi is the fixed frequency and theta the fixed time; c(x) and sgn link the
// two modulations; M = |theta - phi^5/16|.
template <class C>
double measure_area(double theta, double phi, int ka, int kb, double sgn, const C& c, double K, int n) {
  const double S = std::ldexp(1.0, ka + 1) + std::ldexp(1.0, kb + 1);
  const double M = std::abs(theta - std::pow(phi, 5) / 16.0);
  const double ymax = std::sqrt(y_squared(phi, M + S));
  const double ymin = std::max(std::sqrt(y_squared(phi, std::max(0.0, M - S))), K);
  if (!(ymax > ymin)) return 0.0;
  return count_strip(0.5 * (phi + ymin), 0.5 * (phi + ymax), ka, kb, sgn, c, n) +
         count_strip(0.5 * (phi - ymax), 0.5 * (phi - ymin), ka, kb, sgn, c, n);
}

void check_measure_args(double freq, int k1, int k2, double K, int resolution) {
  if (freq == 0.0) throw InvalidInput("measure bound: the fixed frequency must be nonzero");
  if (k1 < 0 || k2 < 0 || !(K >= 0.0)) throw InvalidInput("measure bound: k >= 0 and K >= 0 required");
  if (resolution < 64) throw InvalidInput("measure bound: resolution must be >= 64");
}

double p5(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}

}  // namespace

MeasureCheck measure_bound_check(double tau, double xi, int k1, int k2, double K, int resolution) {
  check_measure_args(xi, k1, k2, K, resolution);
  // Rasterize in the modulation with the smaller shell; the set is symmetric
  // under (tau1, xi1) -> (tau - tau1, xi - xi1).
  const int ka = std::min(k1, k2), kb = std::max(k1, k2);
  auto c = [&](double x) { return tau - p5(x) - p5(xi - x); };
  MeasureCheck out;
  out.area = measure_area(tau, xi, ka, kb, -1.0, c, K, resolution);
  const double p = std::ldexp(1.0, k1 + k2);
  out.bound = p * std::pow(std::abs(xi), -1.5);
  if (K > 0.0) out.bound = std::min(out.bound, p / (K * K * K * std::abs(xi)));
  out.ratio = out.area / out.bound;
  return out;
}

MeasureCheck measure_bound_check_m1(double tau1, double xi1, int k, int k2, double K1, int resolution) {
  check_measure_args(xi1, k, k2, K1, resolution);
  // rho2 = rho + c(xi), rho = tau - xi^5; rasterize the smaller shell.
  auto c = [&](double x) { return p5(x) - tau1 - p5(x - xi1); };
  auto cneg = [&](double x) { return -c(x); };
  MeasureCheck out;
  out.area = k <= k2 ? measure_area(tau1, xi1, k, k2, 1.0, c, K1, resolution)
                     : measure_area(tau1, xi1, k2, k, 1.0, cneg, K1, resolution);
  out.bound = std::pow(std::abs(xi1), -1.5) * std::ldexp(std::pow(2.0, 0.75 * k), k2);
  if (K1 > 0.0) out.bound = std::min(out.bound, std::ldexp(1.0, k + k2) / (K1 * K1 * K1 * std::abs(xi1)));
  out.ratio = out.area / out.bound;
  return out;
}

MeasureSuite measure_suite(bool m1, int count, int resolution, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> shell(0, 6);
  MeasureSuite out;
  out.configurations = count;
  for (int i = 0; i < count; ++i) {
    const double mag = 0.25 * std::pow(16.0, uni(rng));
    const double xi = uni(rng) < 0.5 ? -mag : mag;
    const int k1 = shell(rng), k2 = shell(rng);
    const double M = uni(rng) * std::ldexp(1.0, std::max(k1, k2) + 2);
    const double tau = p5(xi) / 16.0 + (uni(rng) < 0.75 ? 1.0 : -1.0) * (xi > 0 ? M : -M);
    const double S = std::ldexp(1.0, k1 + 1) + std::ldexp(1.0, k2 + 1);
    const double K = uni(rng) < 0.5 ? 0.0 : 1.2 * uni(rng) * std::sqrt(y_squared(xi, M + S));
    const auto a = m1 ? measure_bound_check_m1(tau, xi, k1, k2, K, resolution)
                      : measure_bound_check(tau, xi, k1, k2, K, resolution);
    const auto b = m1 ? measure_bound_check_m1(tau, xi, k1, k2, K, 2 * resolution)
                      : measure_bound_check(tau, xi, k1, k2, K, 2 * resolution);
    out.constant = std::max(out.constant, a.ratio);
    out.constant_refined = std::max(out.constant_refined, b.ratio);
    if (b.area >= 1e-3 * b.bound) {
      out.worst_area_change = std::max(out.worst_area_change, std::abs(a.area - b.area) / b.area);
    }
  }
  return out;
}

MultiplierInstance::MultiplierInstance(int n_, int k_) : n(n_), k(k_) {
  if (n < 2 || k < 2) throw InvalidInput("MultiplierInstance: n >= 2 and k >= 2 required");
  std::size_t size = 1;
  for (int i = 0; i + 1 < k; ++i) size *= static_cast<std::size_t>(n);
  m.assign(size, cplx(0.0));
}

void MultiplierInstance::validate() const {
  if (n < 2 || k < 2) throw InvalidInput("MultiplierInstance: n >= 2 and k >= 2 required");
  std::size_t size = 1;
  for (int i = 0; i + 1 < k; ++i) size *= static_cast<std::size_t>(n);
  if (m.size() != size) throw InvalidInput("MultiplierInstance: m must have n^{k-1} entries");
}

cplx& MultiplierInstance::at(const std::vector<int>& free) {
  if (free.size() + 1 != static_cast<std::size_t>(k)) throw InvalidInput("MultiplierInstance::at: need k - 1 indices");
  std::size_t idx = 0, stride = 1;
  for (int v : free) {
    idx += static_cast<std::size_t>(((v % n) + n) % n) * stride;
    stride *= static_cast<std::size_t>(n);
  }
  return m[idx];
}

namespace {

// All points of Gamma_k(Z_n), in the storage order of MultiplierInstance.
std::vector<int> gamma_points(int n, int k) {
  std::size_t count = 1;
  for (int i = 0; i + 1 < k; ++i) count *= static_cast<std::size_t>(n);
  std::vector<int> pts(count * static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    int sum = 0;
    for (int i = 0; i + 1 < k; ++i) {
      const int v = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      pts[idx * k + i] = v;
      sum += v;
    }
    pts[idx * k + (k - 1)] = ((-sum) % n + n) % n;
  }
  return pts;
}

}  // namespace

MultiplierEstimate multiplier_norm(const MultiplierInstance& inst, int restarts, double tol, std::uint64_t seed) {
  inst.validate();
  if (restarts < 1) throw InvalidInput("multiplier_norm: restarts >= 1");
  const int n = inst.n, k = inst.k;
  const auto pts = gamma_points(n, k);
  const std::size_t count = inst.m.size();
  std::vector<double> results;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    std::vector<std::vector<cplx>> f(static_cast<std::size_t>(k), std::vector<cplx>(static_cast<std::size_t>(n)));
    for (auto& fi : f) {
      double nrm = 0.0;
      for (auto& z : fi) {
        z = cplx(gauss(rng), gauss(rng));
        nrm += std::norm(z);
      }
      for (auto& z : fi) z /= std::sqrt(nrm);
    }
    double value = 0.0, prev = -1.0;
    std::vector<cplx> G(static_cast<std::size_t>(n));
    for (int iter = 0; iter < 2000; ++iter) {
      for (int j = 0; j < k; ++j) {
        std::fill(G.begin(), G.end(), cplx(0.0));
        for (std::size_t p = 0; p < count; ++p) {
          const int* x = &pts[p * k];
          cplx prod = inst.m[p];
          if (prod == cplx(0.0)) continue;
          for (int i = 0; i < k; ++i) {
            if (i != j) prod *= f[static_cast<std::size_t>(i)][static_cast<std::size_t>(x[i])];
          }
          G[static_cast<std::size_t>(x[j])] += prod;
        }
        double nrm = 0.0;
        for (const auto& z : G) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        value = nrm;
        if (nrm == 0.0) break;
        for (std::size_t v = 0; v < G.size(); ++v) f[static_cast<std::size_t>(j)][v] = std::conj(G[v]) / nrm;
      }
      if (value - prev <= tol * value) break;
      prev = value;
    }
    results.push_back(value);
  }
  MultiplierEstimate out;
  out.restarts = restarts;
  out.estimate = *std::max_element(results.begin(), results.end());
  for (double v : results) out.mean += v;
  out.mean /= restarts;
  for (double v : results) out.stddev += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(out.stddev / restarts);
  return out;
}

MultiplierInstance compose(int n, int k1, const std::vector<cplx>& m1, int k2, const std::vector<cplx>& m2) {
  if (k1 < 1 || k2 < 1) throw InvalidInput("compose: k1, k2 >= 1");
  auto power = [n](int k) {
    std::size_t p = 1;
    for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(n);
    return p;
  };
  if (m1.size() != power(k1) || m2.size() != power(k2)) throw InvalidInput("compose: sizes must be n^k1, n^k2");
  MultiplierInstance out(n, k1 + k2);
  const int k = k1 + k2;
  const auto pts = gamma_points(n, k);
  for (std::size_t p = 0; p < out.m.size(); ++p) {
    const int* x = &pts[p * k];
    std::size_t i1 = 0, i2 = 0, s = 1;
    for (int i = 0; i < k1; ++i, s *= static_cast<std::size_t>(n)) i1 += static_cast<std::size_t>(x[i]) * s;
    s = 1;
    for (int i = 0; i < k2; ++i, s *= static_cast<std::size_t>(n)) i2 += static_cast<std::size_t>(x[k1 + i]) * s;
    out.m[p] = m1[i1] * m2[i2];
  }
  return out;
}

MultiplierInstance as_multiplier(int n, int k, const std::vector<cplx>& m) {
  MultiplierInstance out(n, k + 1);
  if (m.size() != out.m.size()) throw InvalidInput("as_multiplier: m must have n^k entries");
  out.m = m;
  return out;
}

TTStarResult ttstar_check(int n, int k, const std::vector<cplx>& m, int restarts, std::uint64_t seed) {
  const auto rhs = multiplier_norm(as_multiplier(n, k, m), restarts, 1e-12, seed);
  // m2(xi) = conj m(-xi).
  std::vector<cplx> m2(m.size());
  for (std::size_t idx = 0; idx < m.size(); ++idx) {
    std::size_t rest = idx, neg = 0, s = 1;
    for (int i = 0; i < k; ++i, s *= static_cast<std::size_t>(n)) {
      const int v = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      neg += static_cast<std::size_t>((n - v) % n) * s;
    }
    m2[neg] = std::conj(m[idx]);
  }
  const auto lhs = multiplier_norm(compose(n, k, m, k, m2), restarts, 1e-12, seed + 1);
  TTStarResult out;
  out.lhs = lhs.estimate;
  out.rhs = rhs.estimate;
  out.rel_gap = std::abs(out.lhs - out.rhs * out.rhs) / (out.rhs * out.rhs);
  return out;
}

}  // namespace kdv5
