#include <cmath>
#include <random>

#include "doctest.h"
#include "kdv5/duhamel.hpp"
#include "kdv5/norms.hpp"
#include "kdv5/quadrature.hpp"

using namespace kdv5;

namespace {

SpectralField gaussian(double delta, double cut, double width = 1.0) {
  const int m = static_cast<int>(std::lround(cut / delta));
  SpectralField f(FrequencyGrid(delta, m), true);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double xi = f.grid.xi(i) / width;
    f.values[i] = std::exp(-xi * xi);
  }
  return f;
}

double p5(double x) { return x * x * x * x * x; }

}  // namespace

TEST_CASE("resonance functions") {
  CHECK(resonance_q1(1, 1) == 30.0);
  CHECK(resonance_q1(0.7, -0.7) == 0.0);
  CHECK(resonance_q1(2, 3) == 2850.0);
  CHECK(resonance_q2(1, 1, 1) == 240.0);
  CHECK(resonance_q2(1, -1, 0.3) == 0.0);
  CHECK(resonance_q2(1, 2, 3) == 7500.0);  // 6^5 - 1 - 32 - 243

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  double worst = 0.0, worst2 = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const double scale = p5(std::abs(a) + std::abs(b));
    worst = std::max(worst, std::abs(resonance_q1(a, b) - (p5(a + b) - p5(a) - p5(b))) / scale);
    const double q = resonance_q2(a, b, c);
    for (double perm : {resonance_q2(b, a, c), resonance_q2(c, b, a), resonance_q2(a, c, b),
                        resonance_q2(b, c, a)}) {
      worst2 = std::max(worst2, std::abs(perm - q) / p5(std::abs(a) + std::abs(b) + std::abs(c)));
    }
    const double direct = p5(a + b + c) - p5(a) - p5(b) - p5(c);
    worst2 = std::max(worst2, std::abs(direct - q) / p5(std::abs(a) + std::abs(b) + std::abs(c)));
  }
  CHECK(worst <= 1e-9);
  CHECK(worst2 <= 1e-9);
}

TEST_CASE("phi factor") {
  CHECK(std::abs(phi_factor(0.0, 2.0) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(phi_factor(kPi, 1.0) - cplx(2.0 / kPi, 0.0)) < 1e-15);
  CHECK(std::abs(phi_factor(1e-12, 1.0) - cplx(0.0, 1.0)) < 1e-10);
  for (double q : {-1e4, -3.0, -1e-7, 1e-9, 0.5, 7.0, 1e6}) {
    for (double t : {0.1, 0.5, 2.0}) {
      // Closed form away from 0, two-term series near 0.
      const double z = q * t;
      const cplx direct = std::abs(z) > 1e-3 ? (1.0 - std::polar(1.0, -z)) / q
                                             : cplx(0.0, t) * (1.0 - cplx(0.0, z / 2) - z * z / 6);
      CHECK(std::abs(phi_factor(q, t) - direct) < 1e-9 * std::abs(direct) + 1e-12);
      CHECK(std::abs(phi_factor(q, t)) <= std::min(2.0 / std::abs(q), t) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("divided differences of exp") {
  auto direct2 = [](cplx a, cplx b) { return (std::exp(a) - std::exp(b)) / (a - b); };
  auto direct3 = [&](cplx a, cplx b, cplx c) { return (direct2(b, c) - direct2(a, b)) / (c - a); };
  const cplx a(0.0, -3.0), b(0.0, 1.7), c(0.0, 10.0);
  CHECK(std::abs(exp_dd(a, b, c) - direct3(a, b, c)) < 1e-14);
  CHECK(std::abs(exp_dd(c, a, b) - direct3(a, b, c)) < 1e-14);
  // Coincident nodes: dd[x, x, x] = e^x / 2.
  CHECK(std::abs(exp_dd(cplx(0, 1), cplx(0, 1), cplx(0, 1)) - std::exp(cplx(0, 1)) / 2.0) < 1e-15);
  // Continuity across the Taylor switch.
  const cplx x(0.0, 0.2);
  const cplx in = exp_dd(0.0, x * 0.0499, x * 0.0099);
  const cplx out = exp_dd(0.0, x * 0.0501, x * 0.0101);
  CHECK(std::abs(in - out) < 1e-4);
  CHECK(std::abs(exp_dd(0.0, cplx(0, 0.009), cplx(0, 0.004)) -
                 direct3(0.0, cplx(0, 0.009), cplx(0, 0.004))) < 1e-10);
}

TEST_CASE("pairing factor equals the iterated time integral") {
  const auto rule = gauss_legendre(40);
  for (auto [p, Q, t] : {std::tuple{3.0, 5.0, 0.5}, {-20.0, 1.0, 0.5}, {0.0, 0.0, 0.3}, {1e-6, 4.0, 1.0}}) {
    // int_0^t e^{-isp} int_0^s e^{-ir(Q-p)} dr ds by nested Gauss-Legendre.
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = 0.5 * t * (rule.nodes[i] + 1.0);
      cplx inner = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double r = 0.5 * s * (rule.nodes[j] + 1.0);
        inner += 0.5 * s * rule.weights[j] * std::polar(1.0, -r * (Q - p));
      }
      acc += 0.5 * t * rule.weights[i] * std::polar(1.0, -s * p) * inner;
    }
    CHECK(std::abs(pairing_factor(p, Q, t) - acc) < 1e-12);
  }
}

TEST_CASE("coefficients") {
  CHECK_THROWS_AS(Coefficients(1, 1, 0), InvalidInput);
  const auto lax = Coefficients::lax(5.0);
  CHECK(lax.c1 == doctest::Approx(-10.0));
  CHECK(lax.c2 == 5.0);
  CHECK(lax.c3 == 10.0);
  CHECK(Coefficients::lax_linear_c1(5.0).c1 == doctest::Approx(-2.0));
}

TEST_CASE("A2 vanishes at t = 0 and is Hermitian for real data") {
  const auto u0 = gaussian(0.1, 3.0);
  const Coefficients c(0.0, 1.0, 2.0);
  CHECK(a2_spectral(u0, 0.0, c).max_abs() == 0.0);
  CHECK(a2_duhamel(u0, 0.0, c, 8).max_abs() == 0.0);
  const auto a = a2_duhamel(u0, 0.1, c, 16);
  CHECK(a.hermitian_defect() < 1e-12);
}

TEST_CASE("A2 with c2 = c3 keeps only the xi^3 symbol") {
  const auto u0 = gaussian(0.1, 3.0);
  const Coefficients c(0.0, 1.5, 1.5);
  const double t = 0.05;
  const auto a = a2_spectral(u0, t, c, 1.0);
  const int m = u0.grid.half_extent();
  double err = 0.0, nrm = 0.0;
  for (int k = -2 * m; k <= 2 * m; ++k) {
    const double xi = k * 0.1;
    cplx sum = 0.0;
    for (int k1 = -m; k1 <= m; ++k1) {
      const int k2 = k - k1;
      if (std::abs(k2) > m) continue;
      sum += 0.75 * xi * xi * xi * phi_factor(resonance_q1(k1 * 0.1, k2 * 0.1), t) *
             u0.values[u0.grid.index_of_mode(k1)] * u0.values[u0.grid.index_of_mode(k2)];
    }
    sum *= 0.1 / (2 * kPi) * std::polar(1.0, t * p5(xi));
    const cplx got = a.values[a.grid.index_of_mode(k)];
    err += std::norm(got - sum);
    nrm += std::norm(sum);
  }
  CHECK(std::sqrt(err / nrm) < 1e-13);
}

TEST_CASE("a2_spectral agrees with a2_duhamel") {
  const auto u0 = gaussian(0.05, 4.5);
  const Coefficients c(0.0, 1.0, 2.0);
  const auto spec = a2_spectral(u0, 0.1, c, 1.0);
  const auto duh = a2_duhamel(u0, 0.1, c, 16);
  CHECK(relative_l2_difference(duh, spec) < 1e-6);
  const auto duh32 = a2_duhamel(u0, 0.1, c, 32);
  CHECK(relative_l2_difference(duh32, duh) < 1e-10);
}

TEST_CASE("a2_spectral flags an under-resolved xi1 rule") {
  const auto u0 = gaussian(0.4, 6.0, 2.0);
  CHECK_THROWS_AS(a2_spectral(u0, 0.5, Coefficients(0.0, 1.0, 2.0)), AccuracyFailure);
}

TEST_CASE("A3 pieces") {
  const auto u0 = gaussian(0.1, 2.5);
  const Coefficients c(1.0, 1.0, 2.0);
  const double t = 0.05;
  CHECK(a3_duhamel(u0, 0.0, c, 8).max_abs() == 0.0);
  CHECK(a3_1_spectral(u0, 0.0, 1.0).max_abs() == 0.0);

  const auto c1_duh = a3_duhamel(u0, t, c, 16, A3Part::C1Only);
  const auto c1_spec = a3_1_spectral(u0, t, 1.0);
  CHECK(relative_l2_difference(c1_duh, c1_spec) < 1e-6);

  const auto full_duh = a3_duhamel(u0, t, c, 12, A3Part::Full);
  const auto full_spec = a3_spectral(u0, t, c);
  CHECK(relative_l2_difference(full_duh, full_spec) < 1e-6);
  CHECK(full_duh.hermitian_defect() < 1e-10);

  // Trilinearity.
  auto scaled = u0;
  for (auto& v : scaled.values) v *= 1.7;
  const auto s3 = a3_1_spectral(scaled, t, 1.0);
  auto ref = c1_spec;
  for (auto& v : ref.values) v *= 1.7 * 1.7 * 1.7;
  CHECK(relative_l2_difference(s3, ref) < 1e-14);
}

TEST_CASE("modulation identities") {
  CHECK(modulation_identity_lhs(0.3, 2.0, -1.0, 1.0) == doctest::Approx(0.0));
  CHECK(modulation_identity_rhs(2.0, 1.0) == 0.0);
  CHECK(modulation_identity_lhs(0.3, 2.0, -1.0, 0.0) == doctest::Approx(30.0));
  CHECK(modulation_identity_rhs(2.0, 0.0) == doctest::Approx(30.0));
  CHECK(modulation_identity_m1_lhs(0.0, 1.0, 0.0, 2.0) == doctest::Approx(0.0));
  CHECK(modulation_identity_m1_rhs(0.0, 2.0) == doctest::Approx(30.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    const double tau = u(rng) * 100, xi = u(rng), tau1 = u(rng) * 100, xi1 = u(rng);
    const double scale = 1e-12 * (std::abs(tau) + std::abs(tau1) + 32 * p5(std::abs(xi) + std::abs(xi1)));
    CHECK(std::abs(modulation_identity_lhs(tau, xi, tau1, xi1) - modulation_identity_rhs(xi, xi1)) <= scale);
    CHECK(std::abs(modulation_identity_m1_lhs(tau, xi, tau1, xi1) - modulation_identity_m1_rhs(xi, xi1)) <= scale);
  }
}
