#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace margint {

//! Row-major so that the covariate vector of one time point is contiguous.
using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

//! Realization of (X_t, Y_t) on the uniform grid t_i = i * step, i = 0..n-1.
//! The horizon is step * (n - 1). Immutable after construction.
class SampledPath
{
public:
  SampledPath(double step, PathMatrix covariates, Eigen::VectorXd responses);

  double step() const { return step_; }
  double horizon() const { return horizon_; }
  Eigen::Index size() const { return covariates_.rows(); }
  int dim() const { return static_cast<int>(covariates_.cols()); }
  double time(Eigen::Index i) const { return step_ * static_cast<double>(i); }

  const PathMatrix& covariates() const { return covariates_; }
  const Eigen::VectorXd& responses() const { return responses_; }

  //! Composite trapezoid weights normalized by the horizon; they sum to 1.
  const Eigen::VectorXd& time_weights() const { return weights_; }

private:
  double step_;
  double horizon_;
  PathMatrix covariates_;
  Eigen::VectorXd responses_;
  Eigen::VectorXd weights_;
};

//! (1/T) int_0^T g(X_t, Y_t) dt by the composite trapezoid rule on the grid.
double time_average(const SampledPath& path,
                    const std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&, double)>& integrand);

//! Trapezoid weights (step / T) * {1/2, 1, ..., 1, 1/2} for n grid points.
Eigen::VectorXd trapezoid_weights(Eigen::Index n);

struct AdditiveComponent
{
  std::string name;
  std::function<double(double)> fn;
};

//! m(x) = mu + sum_l m_l(x_l).
struct AdditiveModelSpec
{
  double mu = 0.0;
  std::vector<AdditiveComponent> components;

  int dim() const { return static_cast<int>(components.size()); }
};

double true_regression(const AdditiveModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

enum class InitialLaw
{
  stationary,
  fixed_zero
};

struct OUParams
{
  double theta = 1.0;
  double sigma = 1.4142135623730951;
  InitialLaw x0_law = InitialLaw::stationary;

  double stationary_variance() const { return sigma * sigma / (2.0 * theta); }
};

//! Number of grid points for a horizon and step: round(horizon / step) + 1.
Eigen::Index grid_size(double horizon, double step);

//! d independent Ornstein-Uhlenbeck coordinates on the grid, simulated with
//! the exact Gaussian transition. Rows are time points.
PathMatrix simulate_ou_covariates(int d, double horizon, double step, const OUParams& params,
                                  std::uint64_t seed);

//! Y_t = mu + sum_l m_l(X_{t,l}) + eps_t with eps a stationary OU process of
//! standard deviation noise_sigma and rate noise_theta, independent of X.
SampledPath attach_response(const PathMatrix& covariates, double step, const AdditiveModelSpec& spec,
                            double noise_sigma, double noise_theta, std::uint64_t seed);

//! Density of the stationary law of scale * X where X has independent OU
//! coordinates with the given parameters.
double ou_stationary_density(const Eigen::Ref<const Eigen::VectorXd>& x, const OUParams& params,
                             double scale = 1.0);

//! The bounded response transform. clip(M) maps y to max(min(y, M), -M).
struct Psi
{
  enum class Kind
  {
    identity,
    clip
  };
  Kind kind = Kind::clip;
  double bound = 50.0;

  static Psi identity() { return { Kind::identity, 0.0 }; }
  static Psi clip(double bound) { return { Kind::clip, bound }; }

  double operator()(double y) const
  {
    if (kind == Kind::identity)
      return y;
    return y > bound ? bound : (y < -bound ? -bound : y);
  }
};

} // namespace margint
