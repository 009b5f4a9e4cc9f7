#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "margint/experiment.hpp"

#include <cmath>

using namespace margint;

namespace {

RateTable
table_of(std::vector<std::pair<double, double>> points)
{
  RateTable t;
  for (auto [T, e] : points) {
    RateRow row;
    row.horizon = T;
    row.error = e;
    row.replicate_errors = { e };
    t.rows.push_back(row);
  }
  return t;
}

RateStudyConfig
tiny_study()
{
  RateStudyConfig c;
  c.simulation.step = 0.1;
  c.T_ladder = { 20.0, 40.0, 80.0 };
  c.replicates = 3;
  c.base_seed = 77;
  c.sup_grid = 5;
  return c;
}

} // namespace

TEST_CASE("rate_slope examples")
{
  CHECK(rate_slope(table_of({ { 100, 0.1 }, { 200, 0.05 }, { 400, 0.025 } }), BandwidthMode::mse).slope ==
        doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(rate_slope(table_of({ { 100, 0.3 }, { 200, 0.3 }, { 400, 0.3 } }), BandwidthMode::mse).slope) <
        1e-14);
  std::vector<std::pair<double, double>> pts;
  for (double T : { 250.0, 500.0, 1000.0, 2000.0, 4000.0 })
    pts.push_back({ T, 3.7 * std::pow(T, -0.8) });
  const auto fit = rate_slope(table_of(pts), BandwidthMode::mse);
  CHECK(std::abs(fit.slope + 0.8) < 1e-12);
  CHECK(fit.ols_se < 1e-10);

  // uniform mode regresses on log(T / log T)
  pts.clear();
  for (double T : { 250.0, 500.0, 1000.0, 2000.0 })
    pts.push_back({ T, std::pow(T / std::log(T), -0.4) });
  CHECK(std::abs(rate_slope(table_of(pts), BandwidthMode::uniform).slope + 0.4) < 1e-12);
}

TEST_CASE("rate_slope rejects degenerate tables")
{
  CHECK_THROWS(rate_slope(table_of({ { 100, 0.1 }, { 200, 0.05 } }), BandwidthMode::mse));
  CHECK_THROWS_AS(rate_slope(table_of({ { 100, 0.1 }, { 200, 0.0 }, { 400, 0.01 } }), BandwidthMode::mse),
                  NumericalFailure);
}

TEST_CASE("theoretical slopes")
{
  CHECK(theoretical_slope(BandwidthMode::mse, 2) == doctest::Approx(-0.8));
  CHECK(theoretical_slope(BandwidthMode::uniform, 2) == doctest::Approx(-0.4));
}

TEST_CASE("seed schedule and default evaluation points")
{
  CHECK(replicate_seed(5, 2, 7) == 5u + 2000000u + 7u);
  const auto pts = default_eval_points(2);
  REQUIRE(pts.size() == 5);
  CHECK(pts[0].isZero());
  CHECK(pts[3](0) == doctest::Approx(0.5));
  CHECK(pts[3](1) == doctest::Approx(-0.5));
}

TEST_CASE("config validation")
{
  auto c = tiny_study();
  CHECK_NOTHROW(validate(c));
  c.T_ladder = { 20.0, 40.0 };
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = tiny_study();
  c.T_ladder = { 20.0, 80.0, 40.0 };
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = tiny_study();
  c.replicates = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("run_rate_study is deterministic and seed-scheduled")
{
  for (auto mode : { BandwidthMode::mse, BandwidthMode::uniform }) {
    auto c = tiny_study();
    c.fit.plan.mode = mode;
    const auto a = run_rate_study(c);
    const auto b = run_rate_study(c);
    REQUIRE(a.ok());
    REQUIRE(a.rows.size() == 3);
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      CHECK(a.rows[r].error == b.rows[r].error);
      CHECK(a.rows[r].replicate_errors == b.rows[r].replicate_errors);
      CHECK(a.rows[r].density_clamped == b.rows[r].density_clamped);
      CHECK(a.rows[r].error > 0.0);
      CHECK(a.rows[r].spread >= 0.0);
      CHECK(a.rows[r].clamp_rate >= 0.0);
      CHECK(a.rows[r].clamp_rate <= 1.0);
    }
    c.replicates = 1;
    const auto one = run_rate_study(c);
    for (std::size_t r = 0; r < a.rows.size(); ++r)
      CHECK(one.rows[r].replicate_errors[0] == a.rows[r].replicate_errors[0]);
  }
}

TEST_CASE("noise-free study still has positive error")
{
  auto c = tiny_study();
  c.simulation.noise_sigma = 0.0;
  const auto t = run_rate_study(c);
  for (const auto& row : t.rows)
    CHECK(row.error > 0.0);
}

TEST_CASE("thread count does not change results")
{
  auto c = tiny_study();
  c.threads = 1;
  const auto serial = run_rate_study(c);
  c.threads = 3;
  const auto parallel = run_rate_study(c);
  for (std::size_t r = 0; r < serial.rows.size(); ++r) {
    CHECK(serial.rows[r].replicate_errors == parallel.rows[r].replicate_errors);
    CHECK(serial.rows[r].density_clamped == parallel.rows[r].density_clamped);
    CHECK(serial.rows[r].density_evaluations == parallel.rows[r].density_evaluations);
  }
}

TEST_CASE("compare_full_vs_additive shares paths")
{
  auto c = tiny_study();
  c.simulation.d = 3;
  c.fit.weights = WeightSystem::symmetric(3, -0.9, 0.9, 3, 8);
  const auto a = compare_full_vs_additive(c);
  const auto b = compare_full_vs_additive(c);
  for (std::size_t r = 0; r < a.full.rows.size(); ++r) {
    CHECK(a.full.rows[r].replicate_errors == b.full.rows[r].replicate_errors);
    CHECK(a.full.rows[r].error > 0.0);
    CHECK(a.additive.rows[r].error > 0.0);
  }
  auto one = tiny_study();
  one.simulation.d = 1;
  one.fit.weights = WeightSystem::symmetric(1, -0.9, 0.9, 3, 16);
  CHECK_THROWS_AS(compare_full_vs_additive(one), std::invalid_argument);
}
