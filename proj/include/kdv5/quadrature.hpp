#pragma once

// Gauss-Legendre rules and composite panels on [lo, hi].

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kdv5 {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n, thread safe.
const QuadRule& gauss_legendre(int n);

/// Rule on [lo, hi] made of `panels` equal panels with n nodes each.
QuadRule composite_gauss(double lo, double hi, int panels, int n);

/// Composite rule over consecutive breakpoints (each gap gets `panels` panels).
QuadRule piecewise_gauss(const std::vector<double>& breaks, int panels, int n);

/// Rule on [lo, hi] graded geometrically towards `lo` (levels layers with
/// ratio 1/2), for integrands with an algebraic endpoint singularity.
QuadRule graded_gauss(double lo, double hi, int levels, int n);

/// Adaptive Gauss-Kronrod (Boost) on [lo, hi] with relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol = 1e-10, double* err = nullptr);

/// Nested adaptive 2D integral over lo_x<=x<=hi_x, y_lo(x)<=y<=y_hi(x).
double integrate_adaptive_2d(const std::function<double(double, double)>& f, double lo_x,
                             double hi_x, const std::function<double(double)>& y_lo,
                             const std::function<double(double)>& y_hi, double rel_tol = 1e-9);

struct AdaptiveReport {
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

/// Globally adaptive Gauss-Kronrod (21 points per panel) for real or complex
/// integrands: bisects the worst panel until the summed error estimate is below
/// max(abs_tol, rel_tol |I|) or max_intervals is reached.
template <class F>
auto integrate_gk(F&& f, double lo, double hi, double rel_tol, double abs_tol = 0.0,
                  int max_intervals = 400, AdaptiveReport* report = nullptr) -> decltype(f(lo)) {
  using T = decltype(f(lo));
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Panel {
    double a, b;
    T value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    const T v = GK::integrate(f, a, b, 0, 0.0, &err);
    // Boost reports the depth-0 error on the reference interval [-1, 1].
    return Panel{a, b, v, 0.5 * (b - a) * err};
  };
  if (!(hi > lo)) return T{};
  std::priority_queue<Panel> queue;
  queue.push(eval(lo, hi));
  T total = queue.top().value;
  double err = queue.top().err;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(Panel{worst.a, worst.b, worst.value, 0.0});
      err -= worst.err;
      continue;
    }
    const Panel left = eval(worst.a, mid);
    const Panel right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  T sum{};
  double esum = 0.0;
  while (!queue.empty()) {
    sum += queue.top().value;
    esum += queue.top().err;
    queue.pop();
  }
  if (report) *report = {esum, count, esum <= std::max(abs_tol, rel_tol * std::abs(sum))};
  return sum;
}

}  // namespace kdv5
