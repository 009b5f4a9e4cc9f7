#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "margint/integration.hpp"
#include "margint/presets.hpp"

#include "naive.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace margint;
using support::vec;

TEST_CASE("WeightDensity normalization and shape")
{
  const WeightDensity q(-1.0, 1.0, 3);
  CHECK(q(0.0) == doctest::Approx(35.0 / 32.0));
  CHECK(q(1.0) == 0.0);
  CHECK(q(-1.5) == 0.0);
  const auto rule = gauss_legendre(16);
  CHECK(rule.integrate([&](double x) { return q(x); }) == doctest::Approx(1.0).epsilon(1e-14));
  const WeightDensity shifted(-0.9, 0.3, 5);
  CHECK(gauss_legendre(16).rescaled(-0.9, 0.3).integrate([&](double x) { return shifted(x); }) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(WeightDensity(1.0, -1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(WeightDensity(-1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("oracle marginal integration with the exact surface")
{
  const auto w1 = WeightSystem::symmetric(1, -1.0, 1.0, 3, 16);
  const auto w2 = WeightSystem::symmetric(2, -1.0, 1.0, 3, 16);
  const auto square = [](const Eigen::VectorXd& x) { return x(0) * x(0); };
  CHECK(marginal_component(square, w1, 0, 0.0) == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
  CHECK(marginal_component(square, w2, 0, 0.7) == doctest::Approx(0.49 - 1.0 / 9.0).epsilon(1e-14));
  const auto id = [](const Eigen::VectorXd& x) { return x(0); };
  CHECK(marginal_component(id, w2, 0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  const auto c = [](const Eigen::VectorXd&) { return 4.2; };
  CHECK(std::abs(marginal_component(c, w2, 1, 0.3)) < 1e-14);

  CHECK(constant_term(c, w2) == doctest::Approx(4.2));
  for (int d : { 1, 2, 3 }) {
    const auto w = WeightSystem::symmetric(d, -1.0, 1.0, 3, 16);
    CHECK(constant_term([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, w) ==
          doctest::Approx(d / 9.0).epsilon(1e-14));
  }
  CHECK(constant_term([](const Eigen::VectorXd&) { return 0.0; }, w2) == 0.0);
  CHECK_THROWS_AS(marginal_component(square, w2, 2, 0.0), std::out_of_range);
}

TEST_CASE("true_eta examples")
{
  const auto w = WeightSystem::symmetric(2, -1.0, 1.0, 3, 16);
  const AdditiveModelSpec spec{ 0.0,
                                { { "id", [](double x) { return x; } }, { "square", [](double x) { return x * x; } } } };
  CHECK(true_eta(spec, w, 0, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(true_eta(spec, w, 1, 0.5) == doctest::Approx(0.25 - 1.0 / 9.0).epsilon(1e-14));
  const AdditiveModelSpec constant{ 0.0, { { "c", [](double) { return 3.0; } }, { "c", [](double) { return 3.0; } } } };
  CHECK(std::abs(true_eta(constant, w, 0, 0.1)) < 1e-14);
}

TEST_CASE("three routes to the additive reconstruction agree")
{
  const auto spec = make_model("paper-desk", 2);
  const auto w = WeightSystem::symmetric(2, -0.9, 0.9, 3, 64);
  const auto m = [&](const Eigen::VectorXd& x) { return true_regression(spec, x); };
  const double c = constant_term(m, w);
  double worst = 0.0;
  for (double a = -1.0; a <= 1.0 + 1e-12; a += 0.25)
    for (double b = -1.0; b <= 1.0 + 1e-12; b += 0.25) {
      const auto x = vec({ a, b });
      const double via_true = true_eta(spec, w, 0, a) + true_eta(spec, w, 1, b) + c;
      const double via_integral = marginal_component(m, w, 0, a) + marginal_component(m, w, 1, b) + c;
      worst = std::max({ worst, std::abs(via_true - m(x)), std::abs(via_integral - m(x)) });
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("factored integrator matches nested quadrature of the estimators")
{
  SimulationSettings s;
  s.horizon = 40.0;
  s.step = 0.1;
  for (int d : { 2, 3 }) {
    s.d = d;
    const auto path = simulate_path(s, make_model("paper-desk", d), 70 + d);
    const RegressionEstimator est(path, Psi::clip(50.0), make_regression_kernels(2, d), 0.35, 0.5,
                                  DensityFunction([&](const auto& x) { return simulated_density(s, x); }));
    const auto w = WeightSystem::symmetric(d, -0.9, 0.9, 3, d == 2 ? 16 : 8);
    const MarginalIntegrator integrator(est, w);

    const auto full = [&](const Eigen::VectorXd& x) { return est.full(x); };
    CHECK(std::abs(integrator.constant() - naive::constant(full, w)) < 1e-10);
    std::mt19937_64 gen(static_cast<unsigned>(d));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 6; ++rep) {
      const double x_l = u(gen);
      for (int l = 0; l < d; ++l) {
        const auto dir = [&](const Eigen::VectorXd& x) { return est.directional(l, x); };
        CHECK(std::abs(integrator.eta(l, x_l) - naive::eta(dir, w, l, x_l)) < 1e-10);
        CHECK(std::abs(integrator.eta(l, x_l) - marginal_component(est, w, l, x_l)) < 1e-12);
      }
    }
    for (int l = 0; l < d; ++l) {
      const auto dir = [&](const Eigen::VectorXd& x) { return est.directional(l, x); };
      CHECK(std::abs(integrator.directional_constant(l) - naive::constant(dir, w)) < 1e-10);
    }
    CHECK(constant_term(est, w) == doctest::Approx(integrator.constant()).epsilon(1e-13));
  }
}

TEST_CASE("AdditiveFit interpolation")
{
  AdditiveFit fit;
  fit.grid_lo = -1.0;
  fit.grid_hi = 1.0;
  fit.grid = uniform_grid(-1.0, 1.0, 3);
  fit.eta.resize(3, 2);
  fit.eta << 0.0, 1.0, 2.0, 1.0, 4.0, 1.0;
  fit.constant = 0.5;
  CHECK(fit.component(0, 0.5) == doctest::Approx(3.0));
  CHECK(fit.component(0, -5.0) == doctest::Approx(0.0));
  CHECK(fit.component(0, 5.0) == doctest::Approx(4.0));
  CHECK(fit.evaluate(vec({ -0.5, 0.2 })) == doctest::Approx(1.0 + 1.0 + 0.5));
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("fit_additive with psi = 0 is identically zero")
{
  SimulationSettings s;
  s.horizon = 30.0;
  const auto path = simulate_path(s, make_model("paper-desk", 2), 3);
  FitConfig config;
  config.psi = [](double) { return 0.0; };
  const auto fit = fit_additive(path, config);
  CHECK(fit.eta.isZero(0.0));
  CHECK(fit.constant == 0.0);
  CHECK(fit.grid.size() == 41);
}

TEST_CASE("fit_additive recovers the components on a long noise-free path")
{
  SimulationSettings s;
  s.horizon = 3000.0;
  s.noise_sigma = 0.0;
  const auto spec = make_model("paper-desk", 2);
  const auto path = simulate_path(s, spec, 12);
  const FitConfig config;
  const AdditiveEstimator est(path, config);
  const auto fit = est.tabulate();
  CHECK(fit.meta.horizon == doctest::Approx(3000.0));
  CHECK(fit.meta.density_evaluations == static_cast<std::uint64_t>(path.size()));
  double worst = 0.0;
  for (double a = -0.8; a <= 0.8 + 1e-12; a += 0.2)
    for (double b = -0.8; b <= 0.8 + 1e-12; b += 0.2)
      worst = std::max(worst, std::abs(fit.evaluate(vec({ a, b })) - true_regression(spec, vec({ a, b }))));
  CHECK(worst < 0.3);
  // the table interpolates the direct evaluation at grid nodes
  for (Eigen::Index g = 0; g < fit.grid.size(); g += 5)
    CHECK(fit.eta(g, 1) == doctest::Approx(est.eta(1, fit.grid(g))).epsilon(1e-15));
}
