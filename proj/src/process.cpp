#include "margint/process.hpp"

#include "margint/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace margint {

Eigen::VectorXd
trapezoid_weights(Eigen::Index n)
{
  if (n < 2)
    throw std::invalid_argument("trapezoid_weights: need at least 2 grid points");
  const double inv = 1.0 / static_cast<double>(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, inv);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return w;
}

SampledPath::SampledPath(double step, PathMatrix covariates, Eigen::VectorXd responses)
  : step_(step)
  , horizon_(0.0)
  , covariates_(std::move(covariates))
  , responses_(std::move(responses))
{
  if (!(step_ > 0.0) || !std::isfinite(step_))
    throw std::invalid_argument("SampledPath: step must be positive and finite");
  if (covariates_.rows() < 2)
    throw std::invalid_argument("SampledPath: need at least 2 samples, got " +
                                std::to_string(covariates_.rows()));
  if (covariates_.cols() < 1)
    throw std::invalid_argument("SampledPath: covariate dimension must be >= 1");
  if (covariates_.rows() != responses_.size())
    throw std::invalid_argument("SampledPath: " + std::to_string(covariates_.rows()) +
                                " covariate rows but " + std::to_string(responses_.size()) +
                                " responses");
  if (!covariates_.allFinite() || !responses_.allFinite())
    throw std::invalid_argument("SampledPath: non-finite sample values");
  horizon_ = step_ * static_cast<double>(covariates_.rows() - 1);
  weights_ = trapezoid_weights(covariates_.rows());
}

double
time_average(const SampledPath& path,
             const std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&, double)>& integrand)
{
  const auto& w = path.time_weights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < path.size(); ++i)
    sum += w(i) * integrand(path.covariates().row(i), path.responses()(i));
  return sum;
}

double
true_regression(const AdditiveModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x)
{
  if (x.size() != spec.dim())
    throw std::invalid_argument("true_regression: point has length " + std::to_string(x.size()) +
                                ", model dimension is " + std::to_string(spec.dim()));
  double value = spec.mu;
  for (int l = 0; l < spec.dim(); ++l)
    value += spec.components[static_cast<std::size_t>(l)].fn(x(l));
  return value;
}

Eigen::Index
grid_size(double horizon, double step)
{
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("step must be positive and finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be positive and finite");
  const auto intervals = static_cast<Eigen::Index>(std::llround(horizon / step));
  if (intervals < 1)
    throw std::invalid_argument("horizon / step yields fewer than 2 grid points");
  return intervals + 1;
}

PathMatrix
simulate_ou_covariates(int d, double horizon, double step, const OUParams& params, std::uint64_t seed)
{
  if (d < 1)
    throw std::invalid_argument("simulate_ou_covariates: d must be >= 1");
  if (!(params.theta > 0.0) || !(params.sigma > 0.0))
    throw std::invalid_argument("simulate_ou_covariates: theta and sigma must be positive");
  const Eigen::Index n = grid_size(horizon, step);

  const double decay = std::exp(-params.theta * step);
  const double innovation_sd = std::sqrt(params.stationary_variance() * (1.0 - decay * decay));
  const double stationary_sd = std::sqrt(params.stationary_variance());

  Rng rng(seed);
  PathMatrix x(n, d);
  for (int l = 0; l < d; ++l)
    x(0, l) = params.x0_law == InitialLaw::stationary ? stationary_sd * rng.normal() : 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    for (int l = 0; l < d; ++l)
      x(i, l) = decay * x(i - 1, l) + innovation_sd * rng.normal();
  return x;
}

SampledPath
attach_response(const PathMatrix& covariates, double step, const AdditiveModelSpec& spec,
                double noise_sigma, double noise_theta, std::uint64_t seed)
{
  if (covariates.cols() != spec.dim())
    throw std::invalid_argument("attach_response: covariates have " +
                                std::to_string(covariates.cols()) + " columns, model has " +
                                std::to_string(spec.dim()) + " components");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("attach_response: noise_sigma must be nonnegative");
  if (!(noise_theta > 0.0))
    throw std::invalid_argument("attach_response: noise_theta must be positive");

  const Eigen::Index n = covariates.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = true_regression(spec, covariates.row(i).transpose());

  if (noise_sigma > 0.0) {
    const double decay = std::exp(-noise_theta * step);
    const double innovation_sd = noise_sigma * std::sqrt(1.0 - decay * decay);
    Rng rng(seed);
    double eps = noise_sigma * rng.normal();
    y(0) += eps;
    for (Eigen::Index i = 1; i < n; ++i) {
      eps = decay * eps + innovation_sd * rng.normal();
      y(i) += eps;
    }
  }
  return SampledPath(step, covariates, std::move(y));
}

double
ou_stationary_density(const Eigen::Ref<const Eigen::VectorXd>& x, const OUParams& params, double scale)
{
  const double var = scale * scale * params.stationary_variance();
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  double value = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    value *= norm * std::exp(-0.5 * x(i) * x(i) / var);
  return value;
}

} // namespace margint
