#include <cmath>
#include <vector>

#include "doctest.h"

#include "critpatch/errors.hpp"
#include "critpatch/kinetics.hpp"

using namespace critpatch;

namespace {

double central_slope(const auto& fn, double x, double step = 1e-6) {
  return (fn(x + step) - fn(x - step)) / (2 * step);
}

std::vector<GrowthMap> sample_maps() {
  return {GrowthMap::linear(1.7), GrowthMap::ricker(0.8), GrowthMap::ricker(2.3),
          GrowthMap::beverton_holt(0.5), GrowthMap::beverton_holt(4.0),
          GrowthMap::skellam(3.0, 0.7)};
}

std::vector<ReactionTerm> sample_reactions() {
  return {ReactionTerm::logistic(0.6), ReactionTerm::linear(-0.4), ReactionTerm::linear(0.3),
          ReactionTerm::quadratic(0.5, 2.0), ReactionTerm::quadratic(-0.2, 1.0)};
}

}  // namespace

TEST_SUITE("kinetics") {

TEST_CASE("growth maps evaluate their defining formulas") {
  const double N = 0.37;
  CHECK(GrowthMap::linear(2.0)(N) == doctest::Approx(0.74));
  CHECK(GrowthMap::ricker(1.5)(N) == doctest::Approx(N * std::exp(1.5 * (1 - N))));
  CHECK(GrowthMap::beverton_holt(3.0)(N) == doctest::Approx(4.0 * N / (1 + 3.0 * N)));
  CHECK(GrowthMap::skellam(2.0, 0.5)(N) == doctest::Approx(2.0 * (1 - std::exp(-0.5 * N))));
  CHECK(eval_growth(GrowthMap::linear(2.0), N) == doctest::Approx(0.74));
}

TEST_CASE("slope at zero matches a finite-difference oracle") {
  for (const auto& g : sample_maps()) {
    CAPTURE(g.family_name());
    const double fd = (g(1e-7) - g(0.0)) / 1e-7;
    CHECK(g.slope_at_zero() == doctest::Approx(fd).epsilon(1e-5));
    CHECK(gprime_at_zero(g) == g.slope_at_zero());
  }
  for (const auto& f : sample_reactions()) {
    CAPTURE(f.family_name());
    CHECK(f.slope_at_zero() == doctest::Approx(central_slope(f, 0.0)).epsilon(1e-6));
  }
}

TEST_CASE("growth maps stay above their quadratic witness on the monotone range") {
  for (const auto& g : sample_maps()) {
    CAPTURE(g.family_name());
    const double top = std::min(g.monotone_limit(), 20.0);
    for (int i = 0; i <= 400; ++i) {
      const double N = top * i / 400.0;
      CHECK(g(N) >= g.slope_at_zero() * N - g.witness(N) - 1e-12);
    }
  }
}

TEST_CASE("reaction terms stay above their quadratic witness") {
  for (const auto& f : sample_reactions()) {
    CAPTURE(f.family_name());
    for (int i = 0; i <= 400; ++i) {
      const double u = 10.0 * i / 400.0;
      CHECK(f(u) >= f.slope_at_zero() * u - f.witness(u) - 1e-12);
    }
  }
}

TEST_CASE("Ricker is monotone exactly up to 1/r") {
  const auto g = GrowthMap::ricker(2.0);
  CHECK(g.monotone_limit() == doctest::Approx(0.5));
  CHECK(central_slope(g, 0.45) > 0.0);
  CHECK(central_slope(g, 0.55) < 0.0);
  CHECK(std::isinf(GrowthMap::beverton_holt(1.0).monotone_limit()));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(GrowthMap::ricker(0.0), ParameterError);
  CHECK_THROWS_AS(GrowthMap::beverton_holt(-1.0), ParameterError);
  CHECK_THROWS_AS(GrowthMap::skellam(1.0, std::nan("")), ParameterError);
  CHECK_THROWS_AS(ReactionTerm::linear(0.0), ParameterError);
  CHECK_THROWS_AS(ReactionTerm::quadratic(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(GrowthMap::linear(2.0)(-0.1), ParameterError);
}

TEST_CASE("viability margin is f'(0) + ln g'(0)") {
  const auto v = check_viability(ReactionTerm::linear(-0.5), GrowthMap::beverton_holt(1.0));
  CHECK(v.margin == doctest::Approx(std::log(2.0) - 0.5));
  CHECK(v.viable);
  CHECK_FALSE(check_viability(ReactionTerm::linear(-1.0), GrowthMap::linear(2.0)).viable);
}

TEST_CASE("equilibrium defect integrates 1/f between g(N) and N") {
  // f = -gamma u: integral is ln(g(N)/N) / gamma.
  const double gamma = 0.3;
  const auto f = ReactionTerm::linear(-gamma);
  const auto g = GrowthMap::beverton_holt(2.0);
  for (double N : {1e-6, 0.05, 0.4, 0.9}) {
    const double expected = std::log(g(N) / N) / gamma - 1.0;
    CHECK(equilibrium_defect(f, g, N) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(equilibrium_defect(f, g, 0.0), ParameterError);
}

TEST_CASE("a zero of f inside the integration range is reported") {
  const auto f = ReactionTerm::logistic(1.0);
  const auto g = GrowthMap::linear(0.5);
  CHECK_THROWS_AS(equilibrium_defect(f, g, 1.5), SingularIntegrandError);
}

TEST_CASE("equilibrium matches the Beverton-Holt closed form") {
  const double lambda = 3.0;
  const double gamma = 0.4;
  const auto root = solve_equilibrium(ReactionTerm::linear(-gamma), GrowthMap::beverton_holt(lambda));
  REQUIRE(root.has_value());
  CHECK(*root == doctest::Approx((std::exp(-gamma) * (1 + lambda) - 1) / lambda).epsilon(1e-10));
}

TEST_CASE("no equilibrium when the population cannot persist") {
  CHECK_FALSE(solve_equilibrium(ReactionTerm::linear(-2.0), GrowthMap::beverton_holt(1.0)));
}

TEST_CASE("equilibrium is a fixed point of the nonspatial recurrence") {
  const auto f = ReactionTerm::linear(-0.5);
  const auto g = GrowthMap::beverton_holt(std::exp(1.0) - 1.0);
  const auto root = solve_equilibrium(f, g);
  REQUIRE(root.has_value());
  const auto traj = iterate_nonspatial(f, g, *root, 3);
  for (double v : traj) CHECK(v == doctest::Approx(*root).epsilon(1e-9));
  // And it attracts nearby states.
  const auto from_below = iterate_nonspatial(f, g, 0.1 * *root, 200);
  CHECK(from_below.back() == doctest::Approx(*root).epsilon(1e-6));
}

TEST_CASE("nonspatial recurrence reproduces the logistic flow") {
  const double r = 0.8;
  const double N0 = 0.2;
  const auto traj = iterate_nonspatial(ReactionTerm::logistic(r), GrowthMap::linear(1.0), N0, 4);
  for (int m = 0; m <= 4; ++m) {
    const double exact = 1.0 / (1.0 + (1.0 / N0 - 1.0) * std::exp(-r * m));
    CHECK(traj[m] == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("nonspatial recurrence flags blow-up") {
  CHECK_THROWS_AS(iterate_nonspatial(ReactionTerm::linear(5.0), GrowthMap::linear(1e6), 1.0, 10),
                  DivergenceError);
}

}  // TEST_SUITE
