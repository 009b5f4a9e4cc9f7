#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "margint/kernel.hpp"
#include "margint/quadrature.hpp"

#include "support.hpp"

#include <cmath>

using namespace margint;
using support::vec;

TEST_CASE("gauss_legendre small rules")
{
  const auto one = gauss_legendre(1);
  CHECK(one.nodes(0) == doctest::Approx(0.0));
  CHECK(one.weights(0) == doctest::Approx(2.0));

  const auto two = gauss_legendre(2);
  CHECK(two.nodes(0) == doctest::Approx(-0.5773502692).epsilon(1e-10));
  CHECK(two.nodes(1) == doctest::Approx(0.5773502692).epsilon(1e-10));
  CHECK(two.weights(0) == doctest::Approx(1.0));
  CHECK(two.weights(1) == doctest::Approx(1.0));
  CHECK(two.integrate([](double u) { return u * u; }) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre weights sum to 2 and nodes ascend")
{
  for (int n = 1; n <= kMaxGaussLegendreNodes; ++n) {
    const auto rule = gauss_legendre(n);
    CHECK(std::abs(rule.weights.sum() - 2.0) < 1e-13);
    for (int i = 1; i < n; ++i)
      CHECK(rule.nodes(i) > rule.nodes(i - 1));
    // symmetric about 0
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(rule.nodes(i) + rule.nodes(n - 1 - i)) < 1e-14);
  }
}

TEST_CASE("gauss_legendre is exact to degree 2n-1")
{
  for (int n : { 3, 8, 16, 32 }) {
    const auto rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(rule.integrate([p](double u) { return std::pow(u, p); }) - exact) < 1e-13);
    }
  }
}

TEST_CASE("gauss_legendre refinement converges on a smooth integrand")
{
  const double exact = 2.0 * std::sin(3.0) / 3.0; // int_{-1}^{1} cos(3u) du
  double previous = 1.0;
  for (int n : { 2, 4, 8 }) {
    const double err =
      std::abs(gauss_legendre(n).integrate([](double u) { return std::cos(3.0 * u); }) - exact);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-10);
}

TEST_CASE("gauss_legendre rescaling and float instantiation")
{
  const auto rule = gauss_legendre(5).rescaled(0.0, 2.0);
  CHECK(rule.integrate([](double x) { return x * x * x; }) == doctest::Approx(4.0));
  const auto rule_f = gauss_legendre<float>(4);
  CHECK(rule_f.weights.sum() == doctest::Approx(2.0f));
}

TEST_CASE("gauss_legendre rejects bad node counts")
{
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(kMaxGaussLegendreNodes + 1), std::invalid_argument);
}

TEST_CASE("make_kernel values at the origin")
{
  CHECK(make_kernel(2)(0.0) == doctest::Approx(0.75));
  CHECK(make_kernel(4)(0.0) == doctest::Approx(1.40625).epsilon(1e-14));
  // order 4 equals (15/8)(1 - (7/3)u^2) times the Epanechnikov kernel
  const auto k4 = make_kernel(4);
  for (double u : { -0.9, -0.3, 0.2, 0.7 })
    CHECK(k4(u) == doctest::Approx(15.0 / 8.0 * (1.0 - 7.0 / 3.0 * u * u) * 0.75 * (1.0 - u * u)).epsilon(1e-13));
}

TEST_CASE("make_kernel moment conditions")
{
  CHECK(kernel_moment(make_kernel(2), 0, 16) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(kernel_moment(make_kernel(2), 1, 16)) < 1e-15);
  CHECK(kernel_moment(make_kernel(2), 2, 16) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(kernel_moment(make_kernel(4), 2, 16)) < 1e-12);
  for (int order : { 2, 4, 6 }) {
    const auto k = make_kernel(order);
    CHECK(std::abs(kernel_moment(k, 0, 32) - 1.0) < 1e-10);
    for (int j = 1; j < order; ++j)
      CHECK(std::abs(kernel_moment(k, j, 32)) < 1e-8);
    // the order-th moment is the first one that does not vanish
    CHECK(std::abs(kernel_moment(k, order, 32)) > 1e-3);
  }
}

TEST_CASE("make_kernel shape properties")
{
  for (int order : { 2, 4, 6 }) {
    const auto k = make_kernel(order);
    CHECK(k.order() == order);
    CHECK(k.support_radius() == 1.0);
    CHECK(k.is_even());
    CHECK(k.vanishes_at_edge());
    CHECK(k(1.0) == doctest::Approx(0.0));
    CHECK(k(1.5) == 0.0);
    CHECK(k(-3.0) == 0.0);
    for (double u : { 0.1, 0.4, 0.8 })
      CHECK(k(u) == doctest::Approx(k(-u)));
    // the reported Lipschitz constant bounds every difference quotient
    const double lip = k.lipschitz_constant();
    CHECK(lip > 0.0);
    for (double u = -1.2; u < 1.2; u += 0.013)
      CHECK(std::abs(k(u + 1e-3) - k(u)) <= lip * 1e-3 * (1.0 + 1e-12));
  }
}

TEST_CASE("make_kernel rejects unsupported orders")
{
  for (int order : { 0, 1, 3, 8, -2 })
    CHECK_THROWS_AS(make_kernel(order), std::invalid_argument);
  CHECK_THROWS_AS(kernel_moment(make_kernel(2), -1, 16), std::invalid_argument);
}

TEST_CASE("product_kernel examples")
{
  const auto base = make_kernel(2);
  CHECK(product_kernel(base, 2)(vec({ 0.0, 0.0 })) == doctest::Approx(0.5625));
  CHECK(product_kernel(base, 1)(vec({ 0.5 })) == doctest::Approx(0.5625));
  CHECK(product_kernel(base, 3)(vec({ 0.0, 0.0, 2.0 })) == 0.0);
  CHECK_THROWS_AS(product_kernel(base, 0), std::invalid_argument);
  CHECK_THROWS_AS(product_kernel(base, 2)(vec({ 0.0 })), std::invalid_argument);
}

TEST_CASE("product_kernel integrates to one")
{
  const auto k = product_kernel(make_kernel(4), 2);
  const auto rule = gauss_legendre(16);
  double sum = 0.0;
  Eigen::VectorXd u(2);
  for (Eigen::Index i = 0; i < rule.size(); ++i)
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
      u << rule.nodes(i), rule.nodes(j);
      sum += rule.weights(i) * rule.weights(j) * k(u);
    }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}
