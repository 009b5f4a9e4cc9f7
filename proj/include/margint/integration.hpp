#pragma once

#include "margint/process.hpp"
#include "margint/quadrature.hpp"
#include "margint/regression.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace margint {

//! Density proportional to (1 - u^2)^s, u the affine image of x from
//! [lo, hi] onto [-1, 1]. It has s - 1 continuous derivatives on the line.
class WeightDensity
{
public:
  WeightDensity(double lo, double hi, int smoothness);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int smoothness() const { return smoothness_; }

  double operator()(double x) const;

private:
  double lo_;
  double hi_;
  int smoothness_;
  double norm_;
};

//! Product weight q(x) = prod_l q_l(x_l) together with the per-axis
//! Gauss-Legendre rules used for every integral against q or q_{-l}.
class WeightSystem
{
public:
  WeightSystem(std::vector<WeightDensity> weights, int nodes_per_axis);

  //! d copies of the same weight density.
  static WeightSystem symmetric(int d, double lo, double hi, int smoothness, int nodes_per_axis);

  int dim() const { return static_cast<int>(weights_.size()); }
  int nodes_per_axis() const { return nodes_; }
  const WeightDensity& weight(int axis) const { return weights_.at(static_cast<std::size_t>(axis)); }

  //! Rule on supp(q_l) whose weights already include q_l at the node, so
  //! sum_i weights(i) g(nodes(i)) approximates int g q_l.
  const QuadratureRule<double>& rule(int axis) const { return rules_.at(static_cast<std::size_t>(axis)); }

  double q(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  //! prod_{j != axis} q_j(x_j); x has full length d and x(axis) is ignored.
  double q_minus(int axis, const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
  std::vector<WeightDensity> weights_;
  int nodes_;
  std::vector<QuadratureRule<double>> rules_;
};

namespace detail {

//! Tensor quadrature over the axes in `axes`; the remaining coordinates of
//! `point` stay fixed.
template <typename F>
double
tensor_integrate(const F& f, const WeightSystem& w, const std::vector<int>& axes, Eigen::VectorXd point)
{
  const std::size_t m = axes.size();
  if (m == 0)
    return f(point);
  std::vector<Eigen::Index> cur(m, 0);
  double sum = 0.0;
  for (;;) {
    double weight = 1.0;
    for (std::size_t a = 0; a < m; ++a) {
      const auto& rule = w.rule(axes[a]);
      point(axes[a]) = rule.nodes(cur[a]);
      weight *= rule.weights(cur[a]);
    }
    sum += weight * f(point);
    std::size_t a = m;
    while (a > 0) {
      --a;
      if (++cur[a] < w.rule(axes[a]).size())
        break;
      cur[a] = 0;
      if (a == 0)
        return sum;
    }
  }
}

inline void
check_axis(const WeightSystem& w, int axis)
{
  if (axis < 0 || axis >= w.dim())
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for dimension " +
                            std::to_string(w.dim()));
}

} // namespace detail

//! int g(x) q(x) dx by tensor Gauss-Legendre quadrature.
template <typename F>
double
integrate_q(const F& g, const WeightSystem& w)
{
  std::vector<int> axes(static_cast<std::size_t>(w.dim()));
  for (int j = 0; j < w.dim(); ++j)
    axes[static_cast<std::size_t>(j)] = j;
  return detail::tensor_integrate(g, w, axes, Eigen::VectorXd::Zero(w.dim()));
}

//! int g(x) q_{-l}(x_{-l}) dx_{-l} with x_l held at x_l.
template <typename F>
double
integrate_q_minus(const F& g, const WeightSystem& w, int axis, double x_l)
{
  detail::check_axis(w, axis);
  std::vector<int> axes;
  for (int j = 0; j < w.dim(); ++j)
    if (j != axis)
      axes.push_back(j);
  Eigen::VectorXd point = Eigen::VectorXd::Zero(w.dim());
  point(axis) = x_l;
  return detail::tensor_integrate(g, w, axes, point);
}

//! Marginal integration of a surface g along axis l:
//!   int g(x) q_{-l}(x_{-l}) dx_{-l} - int g(x) q(x) dx.
//! With g the true regression function this is the centered component eta_l.
template <typename F>
double
marginal_component(const F& g, const WeightSystem& w, int axis, double x_l)
{
  return integrate_q_minus(g, w, axis, x_l) - integrate_q(g, w);
}

//! int g(x) q(x) dx; with g the regression surface this is the constant of
//! the additive reconstruction.
template <typename F>
double
constant_term(const F& g, const WeightSystem& w)
{
  return integrate_q(g, w);
}

//! m_l(x_l) - int m_l q_l, the population target of the component estimate.
double true_eta(const AdditiveModelSpec& spec, const WeightSystem& w, int axis, double x_l);

//! Component and constant estimates built from a RegressionEstimator.
//!
//! The quadrature over q_{-l} (resp. q) of a kernel sum factorizes over
//! samples, so for every sample t and axis j the one-dimensional smoothed
//! weights
//!   G_j(X_{t,j}) = sum_i w_i K((z_i - X_{t,j}) / h) / h
//! over the rule (z_i, w_i) of axis j are tabulated once. The results equal
//! the nested tensor quadrature of the directional and full estimators up to
//! rounding, at O(n d nodes) cost instead of O(n nodes^d) per point.
class MarginalIntegrator
{
public:
  MarginalIntegrator(const RegressionEstimator& estimator, const WeightSystem& weights);

  int dim() const { return static_cast<int>(subtract_.size()); }

  //! eta_hat_l(x_l): directional estimator integrated against q_{-l}, minus
  //! its integral against q.
  double eta(int axis, double x_l) const;

  //! int m_tilde(x) q(x) dx with the full estimator.
  double constant() const { return constant_; }

  //! int m_tilde_l(x) q(x) dx with the directional estimator along `axis`
  //! (the subtracted term of eta_hat_l).
  double directional_constant(int axis) const;

  //! Sum_l eta_hat_l(x_l) + constant().
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
  double h1_;
  Kernel1D k1_;
  // per axis: samples sorted by coordinate and their leave-one-axis-out weights
  std::vector<Eigen::VectorXd> sorted_coord_;
  std::vector<Eigen::VectorXd> sorted_weight_;
  std::vector<double> subtract_;
  double constant_;
};

//! Per-axis tabulation of eta_hat_l on a uniform grid with piecewise-linear
//! interpolation; arguments outside the grid use the end values.
struct AdditiveFit
{
  double grid_lo = -1.0;
  double grid_hi = 1.0;
  Eigen::VectorXd grid;   //!< shared per-axis abscissae
  Eigen::MatrixXd eta;    //!< grid.size() x d
  double constant = 0.0;

  struct Meta
  {
    double horizon = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double density_bandwidth = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t density_evaluations = 0;
    std::uint64_t density_clamped = 0;
  } meta;

  int dim() const { return static_cast<int>(eta.cols()); }
  double component(int axis, double x_l) const;
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

//! points equally spaced abscissae from lo to hi inclusive.
Eigen::VectorXd uniform_grid(double lo, double hi, int points);

AdditiveFit tabulate(const MarginalIntegrator& integrator, double lo, double hi, int points);

//! Component estimate at one point from the directional estimator. Builds
//! a MarginalIntegrator; use that class directly for repeated evaluation.
double marginal_component(const RegressionEstimator& estimator, const WeightSystem& w, int axis,
                          double x_l);

//! int m_tilde q with the full estimator.
double constant_term(const RegressionEstimator& estimator, const WeightSystem& w);

//! Everything needed to go from a path to an additive fit.
struct FitConfig
{
  int k = 2;        //!< regression kernel order
  int k_prime = 6;  //!< density kernel order
  BandwidthPlan plan{};
  double c_prime = 0.5;
  double density_floor = 1e-3;
  ResponseTransform psi = Psi::clip(50.0);
  WeightSystem weights = WeightSystem::symmetric(2, -0.9, 0.9, 3, 16);
  int grid_points = 41;
  double region_lo = -1.0;
  double region_hi = 1.0;
};

//! The estimator stack for one path: density estimate, internalized
//! regression estimator and marginal integrator.
class AdditiveEstimator
{
public:
  AdditiveEstimator(const SampledPath& path, const FitConfig& config);

  const DensityEstimate& density() const { return *density_; }
  const RegressionEstimator& regression() const { return *regression_; }
  const MarginalIntegrator& integrator() const { return *integrator_; }

  double eta(int axis, double x_l) const { return integrator_->eta(axis, x_l); }
  double constant() const { return integrator_->constant(); }
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const { return integrator_->evaluate(x); }

  AdditiveFit tabulate() const;

private:
  const SampledPath* path_;
  FitConfig config_;
  std::unique_ptr<DensityEstimate> density_;
  std::unique_ptr<RegressionEstimator> regression_;
  std::unique_ptr<MarginalIntegrator> integrator_;
};

AdditiveFit fit_additive(const SampledPath& path, const FitConfig& config);

} // namespace margint
