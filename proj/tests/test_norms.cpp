#include <cmath>
#include <random>

#include "doctest.h"
#include "kdv5/norms.hpp"
#include "kdv5/quadrature.hpp"

using namespace kdv5;

namespace {

SpaceTimeField fill(const SpaceTimeGrid& g, auto fn) {
  SpaceTimeField f(g);
  for (std::size_t it = 0; it < g.n_tau(); ++it)
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix) f.at(it, ix) = fn(g.tau(it), g.xi(ix));
  return f;
}

// Trapezoid edge factor: nodes on the boundary of [lo, hi] get weight 1/2.
double edge(double x, double lo, double hi, double h) {
  if (x < lo - 0.25 * h || x > hi + 0.25 * h) return 0.0;
  if (std::abs(x - lo) < 0.25 * h || std::abs(x - hi) < 0.25 * h) return 0.5;
  return 1.0;
}

double mod(double tau, double xi) { return bracket(tau - std::pow(xi, 5)); }

// Random field made of a few constant blocks.
SpaceTimeField random_blocks(const SpaceTimeGrid& g, std::mt19937_64& rng, bool high_only) {
  std::uniform_real_distribution<double> ux(high_only ? 1.0 : -2.5, 2.5);
  std::uniform_real_distribution<double> ut(-60.0, 60.0);
  std::normal_distribution<double> nd;
  SpaceTimeField f(g);
  for (int b = 0; b < 4; ++b) {
    const double xc = (rng() % 2 ? 1 : -1) * std::abs(ux(rng));
    const double tc = ut(rng);
    const cplx amp(nd(rng), nd(rng));
    for (std::size_t it = 0; it < g.n_tau(); ++it)
      for (std::size_t ix = 0; ix < g.n_xi(); ++ix)
        if (std::abs(g.xi(ix) - xc) < 0.3 && std::abs(g.tau(it) - tc) < 5.0) f.at(it, ix) += amp;
  }
  if (high_only) return restrict_high(f);
  // Keep the origin column empty so negative a stays finite.
  for (std::size_t it = 0; it < g.n_tau(); ++it) f.at(it, g.xi_axis.index_of_mode(0)) = 0.0;
  return f;
}

}  // namespace

TEST_CASE("dyadic index") {
  CHECK(dyadic_index(0.0, 0.0) == DyadicIndex{0, 0});
  CHECK(dyadic_index(std::pow(7.0, 5), 7.0) == DyadicIndex{2, 0});
  CHECK(dyadic_index(100.0, 0.0).k == 6);
}

TEST_CASE("region classification") {
  CHECK(region_classify(40.0, 0.125) == Region::D1);
  CHECK(region_classify(10.0, 0.125) == Region::D2);
  CHECK(region_classify(0.0, 2.0) == Region::High);
  CHECK(region_classify(32.0, 0.125) == Region::D1);
  CHECK(region_classify(1e9, 0.0) == Region::D2);
}

TEST_CASE("h_sa norm") {
  BandSpectrum b{{{1.0, 2.0, 1.0}}, false};
  CHECK(h_sa_norm(b, 0.0, 0.0).value == doctest::Approx(1.0).epsilon(1e-12));
  // The two edge cells are half covered: mass (63 + 2/4) / 64.
  const auto f = to_field(b, FrequencyGrid(1.0 / 64, 256));
  CHECK(h_sa_norm(f, 0.0, 0.0).value == doctest::Approx(std::sqrt(63.5 / 64)).epsilon(1e-12));

  BandSpectrum unit{{{0.0, 1.0, 1.0}}, false};
  CHECK(h_sa_norm(unit, 0.0, -0.75).divergent);
  CHECK(h_sa_norm(to_field(unit, FrequencyGrid(1.0 / 64, 128)), 0.0, -0.75).divergent);
  // a = -1/4: int_0^1 xi^{-1/2} <xi>^{2(s-a)} with s = a is 2.
  CHECK(h_sa_norm(unit, -0.25, -0.25).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // Grid value converges to the band value.
  const auto g = to_field(unit, FrequencyGrid(1.0 / 4096, 8192));
  CHECK(h_sa_norm(g, -0.25, -0.25).value == doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("h_sa monotone in s for high-frequency spectra, homogeneous") {
  BandSpectrum b{{{1.5, 3.0, cplx(0.3, 1.0)}, {-4.0, -1.0, 2.0}}, false};
  double prev = 0.0;
  for (double s = -1.0; s <= 2.0; s += 0.25) {
    const double v = h_sa_norm(b, s, -0.5).value;
    CHECK(v >= prev);
    prev = v;
  }
  const auto f = to_field(b, FrequencyGrid(0.01, 500));
  auto g = f;
  for (auto& v : g.values) v *= cplx(0.0, -3.0);
  CHECK(h_sa_norm(g, 0.5, -0.5).value == doctest::Approx(3.0 * h_sa_norm(f, 0.5, -0.5).value));
}

TEST_CASE("xsab norm") {
  SpaceTimeGrid g(FrequencyGrid(0.25, 8), 0.5, 6);
  CHECK(xsab_norm(SpaceTimeField(g), 0.0, 0.0, 0.5).value == 0.0);
  SpaceTimeField one(g);
  one.at(static_cast<std::size_t>(g.tau_half_extent), g.xi_axis.index_of_mode(4)) = 1.0;
  CHECK(xsab_norm(one, 0.0, 0.0, 0.0).value == doctest::Approx(std::sqrt(g.cell_area())));

  // Indicator of [0,1] x [1,2], trapezoid-weighted so the grid sum is O(h^2).
  const double h = 1.0 / 256;
  SpaceTimeGrid fine(FrequencyGrid(h, 600), h, 300);
  const auto f = fill(fine, [&](double tau, double xi) {
    return std::sqrt(edge(tau, 0.0, 1.0, h) * edge(xi, 1.0, 2.0, h));
  });
  const double oracle = std::sqrt(integrate_adaptive_2d(
      [](double xi, double tau) { return mod(tau, xi); }, 1.0, 2.0, [](double) { return 0.0; },
      [](double) { return 1.0; }));
  CHECK(xsab_norm(f, 0.0, 0.0, 0.5).value == doctest::Approx(oracle).epsilon(1e-4));

  // Monotone in b.
  double prev = 0.0;
  for (double b = -1.0; b <= 1.0; b += 0.25) {
    const double v = xsab_norm(f, 0.0, 0.0, b).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("x21 norm sums l2 over j and l1 over k") {
  SpaceTimeGrid g(FrequencyGrid(0.5, 20), 1.0, 300);
  const double cell = std::sqrt(g.cell_area());
  // Cell value making the block norm 1 with s = 0.
  auto unit = [&](double tau, double xi) { return 1.0 / (cell * std::sqrt(mod(tau, xi))); };
  auto place = [&](SpaceTimeField& f, double tau, double xi) {
    const std::size_t it = static_cast<std::size_t>(std::lround(tau / g.delta_tau) + g.tau_half_extent);
    const std::size_t ix = g.xi_axis.index_of_mode(static_cast<int>(std::lround(xi / g.xi_axis.delta())));
    f.at(it, ix) = unit(g.tau(it), g.xi(ix));
  };
  SpaceTimeField two_j(g);
  place(two_j, 1.0, 1.0);
  place(two_j, 243.0, 3.0);
  CHECK(dyadic_index(1.0, 1.0).j != dyadic_index(243.0, 3.0).j);
  CHECK(dyadic_index(1.0, 1.0).k == dyadic_index(243.0, 3.0).k);
  CHECK(x21_norm(two_j, 0.0) == doctest::Approx(std::sqrt(2.0)));

  SpaceTimeField two_k(g);
  place(two_k, 1.0, 1.0);
  place(two_k, 100.0, 1.0);
  CHECK(dyadic_index(1.0, 1.0).j == dyadic_index(100.0, 1.0).j);
  CHECK(dyadic_index(1.0, 1.0).k != dyadic_index(100.0, 1.0).k);
  CHECK(x21_norm(two_k, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("x21 single block in A_2 cap B_3") {
  // xi in [4, 4.05], tau - xi^5 in [9, 11]: <xi> in [4, 8), <tau - xi^5> in [8, 16).
  SpaceTimeGrid g(FrequencyGrid(1.0 / 32, 130), 0.25, 4400);
  SpaceTimeField f(g);
  double mass = 0.0;
  double oracle = 0.0;
  for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
    const double xi = g.xi(ix);
    if (xi < 4.0 || xi > 4.05) continue;
    const double centre = std::pow(xi, 5) + 10.0;
    const int it0 = static_cast<int>(std::lround(centre / g.delta_tau)) + g.tau_half_extent;
    for (int d = -3; d <= 3; ++d) {
      const std::size_t it = static_cast<std::size_t>(it0 + d);
      f.at(it, ix) = 1.0;
      mass += g.cell_area();
      oracle += g.cell_area() * mod(g.tau(it), xi);
    }
  }
  for (auto& v : f.values) v /= std::sqrt(mass);
  oracle = std::sqrt(oracle / mass);
  const double v = x21_norm(f, 0.0);
  CHECK(v >= std::pow(2.0, 1.5));
  CHECK(v <= 4.0);
  CHECK(v == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("xl_a branches") {
  SpaceTimeGrid g(FrequencyGrid(0.1, 20), 1.0, 10);
  SpaceTimeField zero(g);
  for (double a : {-0.25, -0.5, -0.875, -1.2}) {
    WeightParams p{0.5, a, 0.0, {}, {}};
    CHECK(xl_a_norm(zero, p).value == 0.0);
  }
  // One cell at (tau, xi) = (5, 0.1): D2, k = 2.
  REQUIRE(region_classify(5.0, 0.1) == Region::D2);
  REQUIRE(dyadic_index(5.0, 0.1).k == 2);
  auto cell_with_mass = [&](double a) {
    SpaceTimeField f(g);
    const double w = std::pow(0.1, a) * std::sqrt(g.cell_area());
    f.at(15, g.xi_axis.index_of_mode(1)) = 1.0 / w;
    return f;
  };
  WeightParams quarter{0.0, -0.25, 0.0, {}, {}};
  CHECK(xl_a_norm(cell_with_mass(-0.25), quarter).value == doctest::Approx(std::pow(2.0, 1.5)));
  WeightParams half{0.0, -0.5, 0.0, {}, {}};
  CHECK(xl_a_exponent(half) == doctest::Approx(0.6));
  CHECK(xl_a_norm(cell_with_mass(-0.5), half).value == doctest::Approx(std::pow(2.0, 1.2)));
  CHECK(xl_a_norm(cell_with_mass(-0.5), half).value == doctest::Approx(2.2973967));
  WeightParams bad{0.0, -0.2, 0.0, {}, {}};
  CHECK_THROWS_AS(xl_a_norm(zero, bad), InvalidInput);
  WeightParams bad_eps{0.0, -1.0, 0.0, {}, 0.5};
  CHECK_THROWS_AS(xl_a_norm(zero, bad_eps), InvalidInput);
  WeightParams p78{0.0, -0.875, 0.0, {}, {}};
  CHECK(xl_a_exponent(p78) == doctest::Approx(0.375 + 0.0625));
}

TEST_CASE("z norm decomposition") {
  SpaceTimeGrid g(FrequencyGrid(0.05, 60), 0.5, 160);
  std::mt19937_64 rng(5);
  WeightParams p{0.0, -0.5, 0.0, {}, {}};
  const auto high = restrict_high(random_blocks(g, rng, true));
  auto far = high;
  for (std::size_t it = 0; it < g.n_tau(); ++it)
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix)
      if (std::abs(g.xi(ix)) < 2.0) far.at(it, ix) = 0.0;
  CHECK(z_norm(far, p).value == doctest::Approx(x21_norm(far, 0.0)));
  const auto mixed = random_blocks(g, rng, false);
  auto small = mixed;
  for (std::size_t it = 0; it < g.n_tau(); ++it)
    for (std::size_t ix = 0; ix < g.n_xi(); ++ix)
      if (std::abs(g.xi(ix)) > 0.5 || g.xi(ix) == 0.0) small.at(it, ix) = 0.0;
  CHECK(z_norm(small, p).value == doctest::Approx(xl_a_norm(small, p).value));
  const double pieces = x21_norm(restrict_high(mixed), 0.0) + xl_a_norm(restrict_low(mixed), p).value;
  CHECK(z_norm(mixed, p).value == doctest::Approx(pieces));
}

TEST_CASE("dual L2 L1 norm") {
  const double h = 1.0 / 256;
  SpaceTimeGrid g(FrequencyGrid(h, 600), h, 300);
  CHECK(dual_l2l1_norm(SpaceTimeField(g), 0.0, 0.0).value == 0.0);
  const auto f = fill(g, [&](double tau, double xi) {
    return edge(tau, 0.0, 1.0, h) * std::sqrt(edge(xi, 1.0, 2.0, h));
  });
  const double oracle = std::sqrt(integrate_adaptive(
      [](double xi) {
        const double in = integrate_adaptive([xi](double tau) { return 1.0 / mod(tau, xi); }, 0.0, 1.0);
        return in * in;
      },
      1.0, 2.0));
  CHECK(dual_l2l1_norm(f, 0.0, 0.0).value == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("dual norm bounded by Xsab with b = -1/2 + eps times the support factor") {
  SpaceTimeGrid g(FrequencyGrid(0.05, 60), 0.5, 160);
  std::mt19937_64 rng(9);
  const double eps = 0.01;
  // Cauchy-Schwarz in tau: the factor is sup_xi (sum_tau <tau - xi^5>^{-1-2eps} dtau)^{1/2}.
  double factor = 0.0;
  for (std::size_t ix = 0; ix < g.n_xi(); ++ix) {
    double acc = 0.0;
    for (std::size_t it = 0; it < g.n_tau(); ++it)
      acc += std::pow(mod(g.tau(it), g.xi(ix)), -1.0 - 2.0 * eps) * g.delta_tau;
    factor = std::max(factor, std::sqrt(acc));
  }
  for (int i = 0; i < 20; ++i) {
    const auto f = random_blocks(g, rng, false);
    const auto d = dual_l2l1_norm(f, 0.0, -0.25);
    const auto x = xsab_norm(f, 0.0, -0.25, -0.5 + eps);
    REQUIRE(!d.divergent);
    CHECK(d.value <= factor * x.value * (1.0 + 1e-12));
  }
}

TEST_CASE("norm-space invariants on random data") {
  SpaceTimeGrid g(FrequencyGrid(0.05, 60), 0.5, 160);
  std::mt19937_64 rng(21);
  WeightParams p{0.0, -0.5, 0.0, {}, {}};
  for (int i = 0; i < 10; ++i) {
    auto f = random_blocks(g, rng, false);
    auto lf = f;
    const cplx lam(-1.5, 2.0);
    for (auto& v : lf.values) v *= lam;
    CHECK(z_norm(lf, p).value == doctest::Approx(std::abs(lam) * z_norm(f, p).value));
    CHECK(xsab_norm(lf, 0.0, -0.5, 0.3).value ==
          doctest::Approx(std::abs(lam) * xsab_norm(f, 0.0, -0.5, 0.3).value));
    CHECK(dual_l2l1_norm(lf, 0.0, -0.5).value ==
          doctest::Approx(std::abs(lam) * dual_l2l1_norm(f, 0.0, -0.5).value));

    // Block additivity of the high part over A_j.
    const auto hi = restrict_high(f);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      auto blk = hi;
      for (std::size_t it = 0; it < g.n_tau(); ++it)
        for (std::size_t ix = 0; ix < g.n_xi(); ++ix)
          if (dyadic_shell(g.xi(ix)) != j) blk.at(it, ix) = 0.0;
      const double v = x21_norm(blk, 0.0);
      sum += v * v;
    }
    CHECK(x21_norm(hi, 0.0) == doctest::Approx(std::sqrt(sum)));
  }
}

TEST_CASE("admissibility truth table") {
  CHECK(admissible(-0.25, -0.5));
  CHECK_FALSE(admissible(-0.25, -0.875));
  CHECK(admissible(0.0, -1.0));
  CHECK_FALSE(admissible(-0.3, -0.5));
  CHECK_FALSE(admissible(0.0, -1.5));
  CHECK_FALSE(admissible(0.0, -0.2));
  CHECK(admissible(0.5, -1.25));
  CHECK_FALSE(admissible(0.4, -1.25));
  CHECK(s_threshold(-1.0) == 0.0);
}

TEST_CASE("embedding chain constants") {
  const SpaceTimeGrid g(FrequencyGrid(0.05, 60), 2.0, 700);
  const WeightParams p{0.0, -0.5, 0.0, {}, {}};
  const auto fit = embedding_chain_fit(g, p, 0.01, 20, 1, 1024.0);
  CHECK(fit.samples == 20);
  // Frozen at this grid and seed.
  CHECK(fit.upper == doctest::Approx(1.0647).epsilon(1e-3));
  CHECK(fit.lower == doctest::Approx(0.7169).epsilon(1e-3));
  // Holdout batch stays under twice the fitted constants.
  const auto hold = embedding_chain_fit(g, p, 0.01, 20, 1001, 1024.0);
  CHECK(hold.upper <= 2.0 * fit.upper);
  CHECK(hold.lower <= 2.0 * fit.lower);
  const auto f = random_modulated_blocks(g, 4, 1024.0);
  for (std::size_t it = 0; it < g.n_tau(); ++it) CHECK(f.at(it, g.xi_axis.index_of_mode(0)) == cplx(0.0));
  CHECK_THROWS_AS(embedding_chain_fit(g, p, 0.0, 5, 1, 8.0), InvalidInput);
  CHECK_THROWS_AS(random_modulated_blocks(g, 1, 0.5), InvalidInput);
}
