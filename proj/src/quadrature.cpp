#include "kdv5/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "kdv5/errors.hpp"

namespace kdv5 {

namespace {

QuadRule build_rule(int n) {
  QuadRule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes.push_back(z);
    r.weights.push_back(w);
    if (z != 0.0) {
      r.nodes.push_back(-z);
      r.weights.push_back(w);
    }
  }
  return r;
}

void append_panel(QuadRule& out, const QuadRule& ref, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadRule>(build_rule(n));
  return *slot;
}

QuadRule composite_gauss(double lo, double hi, int panels, int n) {
  if (panels < 1) throw InvalidInput("composite_gauss: panels must be >= 1");
  const QuadRule& ref = gauss_legendre(n);
  QuadRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels) * ref.nodes.size());
  out.weights.reserve(out.nodes.capacity());
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) append_panel(out, ref, lo + p * h, lo + (p + 1) * h);
  return out;
}

QuadRule piecewise_gauss(const std::vector<double>& breaks, int panels, int n) {
  QuadRule out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto part = composite_gauss(breaks[i], breaks[i + 1], panels, n);
    out.nodes.insert(out.nodes.end(), part.nodes.begin(), part.nodes.end());
    out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
  }
  return out;
}

QuadRule graded_gauss(double lo, double hi, int levels, int n) {
  const QuadRule& ref = gauss_legendre(n);
  QuadRule out;
  double right = hi;
  for (int l = 0; l < levels; ++l) {
    const double left = lo + 0.5 * (right - lo);
    append_panel(out, ref, left, right);
    right = left;
  }
  append_panel(out, ref, lo, right);
  return out;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol, double* err) {
  if (hi == lo) return 0.0;
  // Boost's recursive driver compares unscaled [-1, 1] errors against the
  // panel value, which over-refines narrow intervals. Use the queue driver.
  AdaptiveReport rep;
  const double v = integrate_gk(f, std::min(lo, hi), std::max(lo, hi), rel_tol, 0.0, 2000, &rep);
  if (err) *err = rep.error;
  return hi > lo ? v : -v;
}

double integrate_adaptive_2d(const std::function<double(double, double)>& f, double lo_x,
                             double hi_x, const std::function<double(double)>& y_lo,
                             const std::function<double(double)>& y_hi, double rel_tol) {
  auto inner = [&](double x) {
    const double a = y_lo(x);
    const double b = y_hi(x);
    if (!(b > a)) return 0.0;
    return integrate_adaptive([&](double y) { return f(x, y); }, a, b, rel_tol);
  };
  return integrate_adaptive(inner, lo_x, hi_x, rel_tol);
}

}  // namespace kdv5
