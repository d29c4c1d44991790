#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "critpatch/errors.hpp"
#include "critpatch/geometry.hpp"
#include "critpatch/spectral.hpp"
#include "critpatch/thresholds.hpp"

using namespace critpatch;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE = std::numbers::e;

}  // namespace

TEST_SUITE("thresholds") {

TEST_CASE("critical hypercube side makes the growth factor exactly one") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double d = u(rng);
    const int n = 1 + i % 3;
    const auto f = ReactionTerm::logistic(u(rng));
    const auto g = GrowthMap::beverton_holt(u(rng));
    const double margin = check_viability(f, g).margin;
    std::vector<double> drift(static_cast<std::size_t>(n), 0.0);
    drift[0] = 0.9 * std::sqrt(4 * d * margin / n) / 2;
    const auto L = critical_hypercube_L(d, drift, f, g, n);
    REQUIRE(L.finite());
    const Domain cube = Domain::rect(std::vector<double>(static_cast<std::size_t>(n), L.value));
    CHECK(lambda1_closed(d, drift, cube).lambda1 == doctest::Approx(margin).epsilon(1e-12));
    const auto S = critical_rect_constraint(d, drift, f, g);
    CHECK(S.value == doctest::Approx(n / (L.value * L.value)).epsilon(1e-12));
  }
}

TEST_CASE("critical radius makes the ball eigenvalue equal the margin") {
  const auto f = ReactionTerm::linear(-0.2);
  const auto g = GrowthMap::ricker(1.1);
  const double margin = 0.9;
  for (int n = 1; n <= 3; ++n) {
    const auto R = critical_radius_ball(0.4, f, g, n);
    CHECK(R.kind == QuantityKind::CriticalRadius);
    CHECK(lambda1_closed(0.4, {}, Domain::ball(R.value, n)).lambda1 ==
          doctest::Approx(margin).epsilon(1e-12));
    // The RFK extreme volume is the volume of that ball.
    const auto V = extreme_volume(VolumeMethod::RFK, 0.4, {}, f, g, n);
    CHECK(V.value == doctest::Approx(unit_ball_volume(n) * std::pow(R.value, n)).epsilon(1e-12));
  }
}

TEST_CASE("extreme volumes are ordered Li-Yau < RFK < cube") {
  const auto f = ReactionTerm::logistic(1.0);
  const auto g = GrowthMap::linear(1.0);
  for (int n = 1; n <= 3; ++n) {
    const double ly = extreme_volume(VolumeMethod::LiYau, 1.0, {}, f, g, n).value;
    const double rfk = extreme_volume(VolumeMethod::RFK, 1.0, {}, f, g, n).value;
    const double cube = extreme_volume(VolumeMethod::Rect, 1.0, {}, f, g, n).value;
    CAPTURE(n);
    CHECK(ly < rfk);
    CHECK(rfk <= cube * (1 + 1e-12));
  }
}

TEST_CASE("Li-Yau extreme volume inverts the Li-Yau bound") {
  const auto f = ReactionTerm::logistic(0.7);
  const auto g = GrowthMap::linear(1.0);
  for (int n = 1; n <= 3; ++n) {
    const double V = extreme_volume(VolumeMethod::LiYau, 2.0, {}, f, g, n).value;
    const Domain ball = Domain::ball(std::pow(V / unit_ball_volume(n), 1.0 / n), n);
    CHECK(liyau_bound(1, 2.0, ball) == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("strong drift makes the critical size unbounded") {
  const auto f = ReactionTerm::logistic(0.25);
  const auto g = GrowthMap::linear(1.0);
  const std::vector<double> drift{1.1};
  const auto L = critical_hypercube_L(1.0, drift, f, g, 1);
  CHECK_FALSE(L.finite());
  CHECK(L.regime == kRegimeUnbounded);
  CHECK(std::isinf(L.value));
  CHECK_FALSE(critical_rect_constraint(1.0, drift, f, g).finite());
  CHECK_FALSE(extreme_volume(VolumeMethod::Rect, 1.0, drift, f, g, 1).finite());
  // The ball-based volumes ignore drift and need a positive margin.
  CHECK(extreme_volume(VolumeMethod::RFK, 1.0, drift, f, g, 1).finite());
  CHECK_THROWS_AS(extreme_volume(VolumeMethod::RFK, 1.0, {}, ReactionTerm::linear(-1.0), g, 1),
                  ParameterError);
}

TEST_CASE("prediction rules") {
  CHECK(predict_from_growth_factor(0.99) == Verdict::Extinction);
  CHECK(predict_from_growth_factor(1.01) == Verdict::Persistence);
  CHECK(predict_from_growth_factor(1.0) == Verdict::Inconclusive);
  CHECK(predict_from_volume(1.0, 2.0) == Verdict::Extinction);
  CHECK(predict_from_volume(2.0, 2.0) == Verdict::Inconclusive);
  CHECK(predict_from_volume(3.0, 2.0) == Verdict::Inconclusive);
}

TEST_CASE("Fisher speeds") {
  const auto [plus, minus] = fisher_speeds(0.25, ReactionTerm::logistic(4.0), 0.5);
  CHECK(plus == doctest::Approx(2.5));
  CHECK(minus == doctest::Approx(1.5));
  CHECK_THROWS_AS(fisher_speeds(1.0, ReactionTerm::linear(-1.0), 0.0), ParameterError);
}

TEST_CASE("marine preset") {
  PresetParams p;
  p.d = 1.0;
  p.gamma = 0.5;
  p.map = GrowthMap::beverton_holt(kE - 1.0);
  const auto r = application_preset(Preset::MarineReserve, p);
  REQUIRE(r.size() == 2);
  CHECK(r[0].name == "L_star");
  CHECK(r[0].value == doctest::Approx(2 * kPi));
  CHECK(r[1].name == "R_star");
  CHECK(r[1].value == doctest::Approx(ball_bessel_zero(2) * std::sqrt(2.0)));

  p.volume = 10.0;
  const auto with_volume = application_preset(Preset::MarineReserve, p);
  REQUIRE(with_volume.size() == 3);
  const double j = ball_bessel_zero(2);
  CHECK(with_volume[2].name == "gamma_ex");
  CHECK(with_volume[2].value == doctest::Approx(j * j / 10.0 - 1.0));

  p.map = GrowthMap::linear(2.0);
  CHECK_THROWS_AS(application_preset(Preset::MarineReserve, p), ParameterError);
}

TEST_CASE("terrestrial preset thresholds sit on the persistence boundary") {
  PresetParams p;
  p.lambda = 1.5;
  p.gamma = 0.3;
  p.lengths = {2.0, 3.0};
  const double margin = std::log(2.5) - 0.3;
  const auto r = application_preset(Preset::TerrestrialReserve, p);
  REQUIRE(r.size() == 2);
  const double d_star = r[0].value;
  CHECK(lambda1_closed(d_star, {}, Domain::rect(p.lengths)).lambda1 ==
        doctest::Approx(margin).epsilon(1e-12));
  // d_ex puts the equal-area disk on the boundary; the disk has the smallest
  // eigenvalue per unit d, so any larger d loses every shape of that area.
  const double d_ex = r[1].value;
  const Domain disk = symmetrize(Domain::rect(p.lengths));
  CHECK(lambda1_closed(d_ex, {}, disk).lambda1 == doctest::Approx(margin).epsilon(1e-12));
  CHECK(d_ex > d_star);
}

TEST_CASE("pest preset") {
  PresetParams p;
  p.d = 0.05;
  p.r = 2.0;
  p.lengths = {1.0, 2.0};
  const auto r = application_preset(Preset::InsectPest, p);
  REQUIRE(r.size() == 2);
  const double s_star = r[0].value;
  const double lam = lambda1_closed(p.d, {}, Domain::rect(p.lengths)).lambda1;
  CHECK(p.r + std::log(1 - s_star) == doctest::Approx(lam).epsilon(1e-12));
  CHECK(r[1].value > s_star);

  p.r = 0.01;
  const auto hopeless = application_preset(Preset::InsectPest, p);
  CHECK(hopeless[0].regime == kRegimeNoPersistence);
}

TEST_CASE("climate preset") {
  PresetParams p;
  p.d = 1.0;
  p.lambda = kE - 1.0;
  p.gamma = 0.5;
  p.lengths = {10.0, 10.0};
  const auto r = application_preset(Preset::ClimateChange, p);
  REQUIRE(r.size() == 1);
  CHECK(r[0].name == "c_max");
  const double c = r[0].value;
  CHECK(c == doctest::Approx(1.100196).epsilon(1e-6));
  const std::vector<double> drift{c, 0.0};
  CHECK(lambda1_closed(1.0, drift, Domain::rect(p.lengths)).lambda1 ==
        doctest::Approx(0.5).epsilon(1e-12));

  p.lengths = {2.0, 2.0};
  const auto none = application_preset(Preset::ClimateChange, p);
  CHECK(none[0].regime == kRegimeNoPersistence);
  CHECK(none[0].value == 0.0);
}

TEST_CASE("preset names") {
  CHECK(preset_from_string("marine") == Preset::MarineReserve);
  CHECK(preset_from_string("insect") == Preset::InsectPest);
  CHECK(preset_from_string("pest") == Preset::InsectPest);
  CHECK_THROWS_AS(preset_from_string("forest"), ParameterError);
}

}  // TEST_SUITE
