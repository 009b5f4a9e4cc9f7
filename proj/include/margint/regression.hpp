#pragma once

#include "margint/density.hpp"
#include "margint/kernel.hpp"
#include "margint/neighbor_index.hpp"
#include "margint/process.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace margint {

enum class BandwidthMode
{
  mse,    //!< h = c T^{-1/(2k+1)}
  uniform //!< h = c (log T / T)^{1/(2k+1)}
};

//! Regression bandwidth schedule.
struct BandwidthPlan
{
  int k = 2;
  double c1 = 1.0;
  double c2 = 1.0;
  BandwidthMode mode = BandwidthMode::mse;
};

struct RegressionBandwidths
{
  double h1;
  double h2;
};

RegressionBandwidths regression_bandwidths(const BandwidthPlan& plan, double horizon);

//! Bandwidth c1 * rate^{1/(2k+d)}: the schedule of a fully d-dimensional
//! smoother. With d = 1 this is the h1 of regression_bandwidths().
double full_dimensional_bandwidth(const BandwidthPlan& plan, double horizon, int d);

//! K1 on R, K2 on R^{d-1} and K3 on R^d, all products of one base kernel.
struct RegressionKernels
{
  Kernel1D k1;
  ProductKernelD k2;
  ProductKernelD k3;
};

RegressionKernels make_regression_kernels(int order, int d);

using ResponseTransform = std::function<double(double)>;
using DensityFunction = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

//! Internalized kernel regression estimators. Each sample carries the weight
//!   a_t = (trapezoid weight) * psi(Y_t) / f(X_t),
//! with f either the estimated or the true covariate density evaluated at the
//! sample point, and
//!   full(x)           = sum_t a_t K3((x - X_t)/h1) / h1^d
//!   directional(l, x) = sum_t a_t K1((x_l - X_{t,l})/h1) K2((x_{-l} - X_{t,-l})/h2)
//!                             / (h1 h2^{d-1}).
//!
//! Holds a reference to the path, which must outlive the estimator.
class RegressionEstimator
{
public:
  //! Estimated-density variant; evaluates density.at_samples() once.
  RegressionEstimator(const SampledPath& path, ResponseTransform psi, RegressionKernels kernels,
                      double h1, double h2, const DensityEstimate& density);

  //! Known-density variant.
  RegressionEstimator(const SampledPath& path, ResponseTransform psi, RegressionKernels kernels,
                      double h1, double h2, const DensityFunction& density);

  //! Density values at the sample points supplied directly.
  RegressionEstimator(const SampledPath& path, ResponseTransform psi, RegressionKernels kernels,
                      double h1, double h2, Eigen::VectorXd density_at_samples);

  const SampledPath& path() const { return *path_; }
  const RegressionKernels& kernels() const { return kernels_; }
  int dim() const { return path_->dim(); }
  double h1() const { return h1_; }
  double h2() const { return h2_; }

  const Eigen::VectorXd& density_at_samples() const { return density_; }
  const Eigen::VectorXd& sample_weights() const { return weights_; }

  double full(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double directional(int axis, const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
  void check_point(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const SampledPath* path_;
  ResponseTransform psi_;
  RegressionKernels kernels_;
  double h1_;
  double h2_;
  Eigen::VectorXd density_;
  Eigen::VectorXd weights_;
  std::shared_ptr<const NeighborIndex> index_;
  Eigen::VectorXd position_weights_;
};

} // namespace margint
