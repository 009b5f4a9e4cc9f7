#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace margint {

//! Nodes and weights of a one-dimensional quadrature rule.
template <typename Scalar>
struct QuadratureRule
{
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector nodes;
  Vector weights;

  Eigen::Index size() const { return nodes.size(); }

  //! Affine image of the rule on [lo, hi], assuming it is defined on [-1, 1].
  QuadratureRule rescaled(Scalar lo, Scalar hi) const
  {
    const Scalar half = (hi - lo) / Scalar(2);
    const Scalar mid = (hi + lo) / Scalar(2);
    return { (nodes.array() * half + mid).matrix(), weights * half };
  }

  template <typename F>
  Scalar integrate(const F& f) const
  {
    Scalar sum(0);
    for (Eigen::Index i = 0; i < nodes.size(); ++i)
      sum += weights(i) * f(nodes(i));
    return sum;
  }
};

inline constexpr int kMaxGaussLegendreNodes = 64;

//! n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree
//! at most 2n - 1. Nodes are returned in increasing order.
template <typename Scalar = double>
QuadratureRule<Scalar>
gauss_legendre(int n)
{
  if (n < 1 || n > kMaxGaussLegendreNodes) {
    throw std::invalid_argument("gauss_legendre: node count must lie in [1, " +
                                std::to_string(kMaxGaussLegendreNodes) +
                                "], got " + std::to_string(n));
  }
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  // Newton iteration on P_n from the Tricomi initial guess; roots come out
  // in decreasing order so they are stored back to front.
  for (int i = 0; i < n; ++i) {
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp(0);
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0(1), p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Scalar p2 = ((Scalar(2 * j - 1)) * x * p1 - Scalar(j - 1) * p0) / Scalar(j);
        p0 = p1;
        p1 = p2;
      }
      const Scalar pn = (n == 1) ? x : p1;
      const Scalar pnm1 = (n == 1) ? Scalar(1) : p0;
      dp = Scalar(n) * (x * pn - pnm1) / (x * x - Scalar(1));
      const Scalar dx = pn / dp;
      x -= dx;
      if (std::abs(dx) <= Scalar(4) * eps)
        break;
    }
    // one more derivative evaluation at the converged root
    Scalar p0(1), p1 = x;
    for (int j = 2; j <= n; ++j) {
      const Scalar p2 = ((Scalar(2 * j - 1)) * x * p1 - Scalar(j - 1) * p0) / Scalar(j);
      p0 = p1;
      p1 = p2;
    }
    const Scalar pn = (n == 1) ? x : p1;
    const Scalar pnm1 = (n == 1) ? Scalar(1) : p0;
    dp = Scalar(n) * (x * pn - pnm1) / (x * x - Scalar(1));

    rule.nodes(n - 1 - i) = x;
    rule.weights(n - 1 - i) = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
  }
  if (n % 2 == 1)
    rule.nodes(n / 2) = Scalar(0);
  return rule;
}

} // namespace margint
