#pragma once

#include "margint/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace margint {

//! Univariate polynomial kernel supported on [-r, r].
//!
//! Inside the support the kernel is the polynomial sum_i coeffs[i] u^i; it
//! vanishes outside. Built by make_kernel() as an even-polynomial multiple of
//! the Epanechnikov kernel, so it is continuous on the real line and zero at
//! the support edges.
template <typename Scalar>
class PolynomialKernel
{
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PolynomialKernel(int order, Vector coeffs, Scalar support_radius = Scalar(1))
    : order_(order)
    , coeffs_(std::move(coeffs))
    , radius_(support_radius)
  {
    if (coeffs_.size() == 0)
      throw std::invalid_argument("PolynomialKernel: empty coefficient vector");
    if (!(radius_ > Scalar(0)))
      throw std::invalid_argument("PolynomialKernel: support radius must be positive");
    lipschitz_ = compute_lipschitz();
    even_ = true;
    for (Eigen::Index i = 1; i < coeffs_.size(); i += 2)
      even_ = even_ && coeffs_(i) == Scalar(0);
    if (even_) {
      even_coeffs_.resize((coeffs_.size() + 1) / 2);
      for (Eigen::Index i = 0; i < even_coeffs_.size(); ++i)
        even_coeffs_(i) = coeffs_(2 * i);
      factor_edge();
    }
  }

  int order() const { return order_; }
  Scalar support_radius() const { return radius_; }
  const Vector& coefficients() const { return coeffs_; }

  //! True when only even powers appear; then K(u) = P(u^2) on the support
  //! with P given by even_coefficients().
  bool is_even() const { return even_; }
  const Vector& even_coefficients() const { return even_coeffs_; }

  //! True when K(u) = (1 - u^2 / r^2) Q(u^2) on the support, so that
  //! K(u) = max(1 - u^2 / r^2, 0) Q(u^2) on the whole line. Q's coefficients
  //! are edge_quotient().
  bool vanishes_at_edge() const { return edge_quotient_.size() > 0; }
  const Vector& edge_quotient() const { return edge_quotient_; }

  //! Upper bound on |K(u) - K(v)| / |u - v| over the real line.
  Scalar lipschitz_constant() const { return lipschitz_; }

  Scalar operator()(Scalar u) const
  {
    if (std::abs(u) > radius_)
      return Scalar(0);
    return even_ ? horner(even_coeffs_, u * u) : horner(coeffs_, u);
  }
  Scalar evaluate(Scalar u) const { return (*this)(u); }

  //! int u^j K(u) du over the support with an n-point Gauss-Legendre rule.
  Scalar moment(int j, int nodes) const
  {
    const auto rule = gauss_legendre<Scalar>(nodes).rescaled(-radius_, radius_);
    return rule.integrate([&](Scalar u) { return std::pow(u, j) * horner(coeffs_, u); });
  }

private:
  static Scalar horner(const Vector& c, Scalar u)
  {
    Scalar acc(0);
    for (Eigen::Index i = c.size() - 1; i >= 0; --i)
      acc = acc * u + c(i);
    return acc;
  }

  static Vector differentiate(const Vector& c)
  {
    if (c.size() <= 1)
      return Vector::Zero(1);
    Vector d(c.size() - 1);
    for (Eigen::Index i = 1; i < c.size(); ++i)
      d(i - 1) = Scalar(i) * c(i);
    return d;
  }

  // synthetic division of P(v) by (1 - v / r^2)
  void factor_edge()
  {
    const Eigen::Index m = even_coeffs_.size() - 1;
    if (m < 1)
      return;
    const Scalar inv_r2 = Scalar(1) / (radius_ * radius_);
    Vector q(m);
    q(0) = even_coeffs_(0);
    for (Eigen::Index i = 1; i < m; ++i)
      q(i) = even_coeffs_(i) + q(i - 1) * inv_r2;
    const Scalar remainder = even_coeffs_(m) + q(m - 1) * inv_r2;
    const Scalar scale = even_coeffs_.cwiseAbs().maxCoeff();
    if (std::abs(remainder) <= Scalar(1e-12) * scale)
      edge_quotient_ = std::move(q);
  }

  // max |K'| on a fine grid plus half the spacing times a bound on |K''|.
  Scalar compute_lipschitz() const
  {
    const Vector d1 = differentiate(coeffs_);
    const Vector d2 = differentiate(d1);
    Scalar bound2(0);
    for (Eigen::Index i = 0; i < d2.size(); ++i)
      bound2 += std::abs(d2(i)) * std::pow(radius_, Scalar(i));
    constexpr int kGrid = 4000;
    const Scalar spacing = Scalar(2) * radius_ / Scalar(kGrid);
    Scalar best(0);
    for (int i = 0; i <= kGrid; ++i) {
      const Scalar u = -radius_ + spacing * Scalar(i);
      best = std::max(best, std::abs(horner(d1, u)));
    }
    return best + Scalar(0.5) * spacing * bound2;
  }

  int order_;
  Vector coeffs_;
  Scalar radius_;
  Scalar lipschitz_{};
  bool even_ = false;
  Vector even_coeffs_;
  Vector edge_quotient_;
};

using Kernel1D = PolynomialKernel<double>;

//! Kernel of the requested even order (2, 4 or 6) on [-1, 1].
//!
//! Order 2 is Epanechnikov, 0.75 (1 - u^2). Higher orders multiply it by an
//! even polynomial p(u^2) of degree order/2 - 1 whose coefficients solve the
//! linear system int K = 1, int u^{2i} K = 0 for 1 <= i < order/2. Odd
//! moments vanish by symmetry.
template <typename Scalar = double>
PolynomialKernel<Scalar>
make_kernel(int order)
{
  if (order != 2 && order != 4 && order != 6) {
    throw std::invalid_argument("make_kernel: unsupported kernel order " +
                                std::to_string(order) + " (supported: 2, 4, 6)");
  }
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const int m = order / 2; // number of unknowns p_0 .. p_{m-1}
  // int_{-1}^{1} u^{2n} * 0.75 (1 - u^2) du
  auto epa_even_moment = [](int n) {
    return Scalar(1.5) * (Scalar(1) / Scalar(2 * n + 1) - Scalar(1) / Scalar(2 * n + 3));
  };
  Matrix system(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      system(i, j) = epa_even_moment(i + j);
  Vector rhs = Vector::Zero(m);
  rhs(0) = Scalar(1);
  const Vector p = system.fullPivLu().solve(rhs);

  // expand 0.75 (1 - u^2) * sum_j p_j u^{2j}
  Vector coeffs = Vector::Zero(order + 1);
  for (int j = 0; j < m; ++j) {
    coeffs(2 * j) += Scalar(0.75) * p(j);
    coeffs(2 * j + 2) -= Scalar(0.75) * p(j);
  }
  return PolynomialKernel<Scalar>(order, std::move(coeffs));
}

//! Tensor product of univariate kernels, K(v) = prod_i K_i(v_i).
template <typename Scalar>
class ProductKernel
{
public:
  using Factor = PolynomialKernel<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit ProductKernel(std::vector<Factor> factors)
    : factors_(std::move(factors))
  {
  }

  //! Number of factors. A zero-dimensional product evaluates to 1.
  int dim() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int i) const { return factors_[static_cast<std::size_t>(i)]; }
  const std::vector<Factor>& factors() const { return factors_; }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& v) const
  {
    if (v.size() != dim()) {
      throw std::invalid_argument("ProductKernel: argument has length " +
                                  std::to_string(v.size()) + ", expected " +
                                  std::to_string(dim()));
    }
    Scalar value(1);
    for (int i = 0; i < dim(); ++i) {
      value *= factors_[static_cast<std::size_t>(i)](v(i));
      if (value == Scalar(0))
        return value;
    }
    return value;
  }
  template <typename Derived>
  Scalar evaluate(const Eigen::MatrixBase<Derived>& v) const
  {
    return (*this)(v);
  }

  //! Lower and upper corners of the hyper-rectangle support.
  Vector support_lower() const
  {
    Vector lo(dim());
    for (int i = 0; i < dim(); ++i)
      lo(i) = -factors_[static_cast<std::size_t>(i)].support_radius();
    return lo;
  }
  Vector support_upper() const { return -support_lower(); }

private:
  std::vector<Factor> factors_;
};

using ProductKernelD = ProductKernel<double>;

template <typename Scalar>
ProductKernel<Scalar>
product_kernel(const PolynomialKernel<Scalar>& base, int dim)
{
  if (dim < 1)
    throw std::invalid_argument("product_kernel: dimension must be >= 1, got " +
                                std::to_string(dim));
  return ProductKernel<Scalar>(std::vector<PolynomialKernel<Scalar>>(static_cast<std::size_t>(dim), base));
}

//! int u^j K(u) du, see PolynomialKernel::moment.
template <typename Scalar>
Scalar
kernel_moment(const PolynomialKernel<Scalar>& kernel, int j, int nodes)
{
  if (j < 0)
    throw std::invalid_argument("kernel_moment: moment index must be nonnegative");
  return kernel.moment(j, nodes);
}

} // namespace margint
