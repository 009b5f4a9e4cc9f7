#include "margint/regression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace margint {

namespace {

double
rate_base(BandwidthMode mode, double horizon)
{
  if (mode == BandwidthMode::uniform) {
    if (!(horizon > 1.0))
      throw std::invalid_argument("regression bandwidths: uniform mode needs horizon > 1, got " +
                                  std::to_string(horizon));
    return std::log(horizon) / horizon;
  }
  if (!(horizon > 0.0))
    throw std::invalid_argument("regression bandwidths: horizon must be positive");
  return 1.0 / horizon;
}

void
check_plan(const BandwidthPlan& plan)
{
  if (plan.k < 1)
    throw std::invalid_argument("BandwidthPlan: k must be >= 1");
  if (!(plan.c1 > 0.0) || !(plan.c2 > 0.0))
    throw std::invalid_argument("BandwidthPlan: c1 and c2 must be positive");
}

} // namespace

RegressionBandwidths
regression_bandwidths(const BandwidthPlan& plan, double horizon)
{
  check_plan(plan);
  const double scale = std::pow(rate_base(plan.mode, horizon), 1.0 / (2.0 * plan.k + 1.0));
  return { plan.c1 * scale, plan.c2 * scale };
}

double
full_dimensional_bandwidth(const BandwidthPlan& plan, double horizon, int d)
{
  check_plan(plan);
  if (d < 1)
    throw std::invalid_argument("full_dimensional_bandwidth: d must be >= 1");
  return plan.c1 * std::pow(rate_base(plan.mode, horizon), 1.0 / (2.0 * plan.k + d));
}

RegressionKernels
make_regression_kernels(int order, int d)
{
  if (d < 1)
    throw std::invalid_argument("make_regression_kernels: d must be >= 1");
  const Kernel1D base = make_kernel(order);
  return { base,
           ProductKernelD(std::vector<Kernel1D>(static_cast<std::size_t>(d - 1), base)),
           product_kernel(base, d) };
}

RegressionEstimator::RegressionEstimator(const SampledPath& path, ResponseTransform psi,
                                         RegressionKernels kernels, double h1, double h2,
                                         const DensityEstimate& density)
  : RegressionEstimator(path, std::move(psi), std::move(kernels), h1, h2, density.at_samples())
{
}

namespace {
Eigen::VectorXd
evaluate_on_samples(const SampledPath& path, const DensityFunction& density)
{
  Eigen::VectorXd out(path.size());
  for (Eigen::Index i = 0; i < path.size(); ++i) {
    out(i) = density(path.covariates().row(i).transpose());
    if (!(out(i) > 0.0))
      throw std::domain_error("RegressionEstimator: known density is not positive at sample " +
                              std::to_string(i));
  }
  return out;
}
} // namespace

RegressionEstimator::RegressionEstimator(const SampledPath& path, ResponseTransform psi,
                                         RegressionKernels kernels, double h1, double h2,
                                         const DensityFunction& density)
  : RegressionEstimator(path, std::move(psi), std::move(kernels), h1, h2,
                        evaluate_on_samples(path, density))
{
}

RegressionEstimator::RegressionEstimator(const SampledPath& path, ResponseTransform psi,
                                         RegressionKernels kernels, double h1, double h2,
                                         Eigen::VectorXd density_at_samples)
  : path_(&path)
  , psi_(std::move(psi))
  , kernels_(std::move(kernels))
  , h1_(h1)
  , h2_(h2)
  , density_(std::move(density_at_samples))
{
  const int d = path.dim();
  if (!(h1_ > 0.0) || !(h2_ > 0.0))
    throw std::invalid_argument("RegressionEstimator: bandwidths must be positive");
  if (kernels_.k2.dim() != d - 1 || kernels_.k3.dim() != d)
    throw std::invalid_argument("RegressionEstimator: K2 needs d-1 factors and K3 d factors");
  if (density_.size() != path.size())
    throw std::invalid_argument("RegressionEstimator: density vector length mismatch");
  if (!psi_)
    throw std::invalid_argument("RegressionEstimator: empty response transform");

  weights_.resize(path.size());
  const auto& tw = path.time_weights();
  for (Eigen::Index i = 0; i < path.size(); ++i)
    weights_(i) = tw(i) * psi_(path.responses()(i)) / density_(i);

  double reach = kernels_.k1.support_radius();
  for (const auto& f : kernels_.k3.factors())
    reach = std::min(reach, f.support_radius());
  index_ = std::make_shared<NeighborIndex>(path.covariates(), 0.5 * reach * std::min(h1_, h2_));
  position_weights_.resize(path.size());
  for (Eigen::Index p = 0; p < path.size(); ++p)
    position_weights_(p) = weights_(index_->original(p));
}

void
RegressionEstimator::check_point(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  if (x.size() != dim())
    throw std::invalid_argument("RegressionEstimator: point has length " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(dim()));
}

double
RegressionEstimator::full(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  check_point(x);
  const int d = dim();
  const Eigen::VectorXd center = x;
  double radius[NeighborIndex::kMaxDim];
  for (int j = 0; j < d; ++j)
    radius[j] = kernels_.k3.factor(j).support_radius() * h1_;
  const double inv_h = 1.0 / h1_;

  double sum = 0.0;
  index_->for_each_candidate(center.data(), radius, [&](Eigen::Index p) {
    const double* row = index_->point(p);
    double value = position_weights_(p);
    for (int j = 0; j < d && value != 0.0; ++j)
      value *= kernels_.k3.factor(j)((center(j) - row[j]) * inv_h);
    sum += value;
  });
  return sum / std::pow(h1_, d);
}

double
RegressionEstimator::directional(int axis, const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  check_point(x);
  const int d = dim();
  if (axis < 0 || axis >= d)
    throw std::out_of_range("RegressionEstimator: axis " + std::to_string(axis) +
                            " out of range for dimension " + std::to_string(d));
  const Eigen::VectorXd center = x;
  double radius[NeighborIndex::kMaxDim];
  for (int j = 0, f = 0; j < d; ++j) {
    if (j == axis)
      radius[j] = kernels_.k1.support_radius() * h1_;
    else
      radius[j] = kernels_.k2.factor(f++).support_radius() * h2_;
  }
  const double inv_h1 = 1.0 / h1_;
  const double inv_h2 = 1.0 / h2_;

  double sum = 0.0;
  index_->for_each_candidate(center.data(), radius, [&](Eigen::Index p) {
    const double* row = index_->point(p);
    double value = position_weights_(p) * kernels_.k1((center(axis) - row[axis]) * inv_h1);
    for (int j = 0, f = 0; j < d && value != 0.0; ++j) {
      if (j == axis)
        continue;
      value *= kernels_.k2.factor(f++)((center(j) - row[j]) * inv_h2);
    }
    sum += value;
  });
  return sum / (h1_ * std::pow(h2_, d - 1));
}

} // namespace margint
