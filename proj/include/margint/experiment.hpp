#pragma once

#include "margint/integration.hpp"
#include "margint/presets.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace margint {

//! Raised when a replicate or a slope fit cannot be completed.
class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RateStudyConfig
{
  SimulationSettings simulation{}; //!< horizon is taken from the ladder
  FitConfig fit{};                 //!< fit.plan.mode selects the error statistic
  std::vector<double> T_ladder{ 250.0, 500.0, 1000.0, 2000.0, 4000.0 };
  int replicates = 50;
  std::uint64_t base_seed = 20240601;
  //! Points for the squared-error average (mse mode).
  std::vector<Eigen::VectorXd> eval_points{};
  //! Per-axis resolution and range of the sup-norm grid (uniform mode).
  int sup_grid = 21;
  double sup_lo = -0.9;
  double sup_hi = 0.9;
  //! OpenMP threads for the replicate loop; 0 keeps the runtime default.
  int threads = 0;

  BandwidthMode mode() const { return fit.plan.mode; }
};

//! The five interior points 0, +0.5, -0.5 and the two alternating-sign
//! corners (+0.5, -0.5, ...) and (-0.5, +0.5, ...).
std::vector<Eigen::VectorXd> default_eval_points(int d);

void validate(const RateStudyConfig& config);

//! Seed of one replicate: base_seed + rung * 10^6 + replicate.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t rung, int replicate);

struct RateRow
{
  double horizon = 0.0;
  double error = 0.0;   //!< mean over replicates of the per-replicate statistic
  double spread = 0.0;  //!< sample standard deviation of that statistic
  double clamp_rate = 0.0;
  std::uint64_t density_evaluations = 0;
  std::uint64_t density_clamped = 0;
  std::vector<double> replicate_errors;
  std::string failure; //!< empty unless a replicate failed
};

struct RateTable
{
  BandwidthMode mode = BandwidthMode::mse;
  std::vector<RateRow> rows;

  bool ok() const;
};

//! Simulates, fits and scores every (rung, replicate) pair. Replicates run in
//! parallel; aggregation happens afterwards in replicate order, so the table
//! does not depend on scheduling.
RateTable run_rate_study(const RateStudyConfig& config);

struct SlopeFit
{
  double slope = 0.0;
  double intercept = 0.0;
  //! sqrt(ols_se^2 + sampling_se^2)
  double slope_se = 0.0;
  //! classical least-squares standard error from the residuals
  double ols_se = 0.0;
  //! replicate noise of each rung's mean, propagated through the fit
  double sampling_se = 0.0;
};

//! Least-squares slope of log(error) against log(T) (mse) or log(T / log T)
//! (uniform).
SlopeFit rate_slope(const RateTable& table, BandwidthMode mode);

//! -2k/(2k+1) for mse, -k/(2k+1) for uniform.
double theoretical_slope(BandwidthMode mode, int k);

struct Comparison
{
  RateTable additive;
  RateTable full;
  SlopeFit slope_additive;
  SlopeFit slope_full;
};

//! Squared error of the additive fit and of the full d-dimensional estimator
//! at the evaluation points, on the same simulated paths. The full estimator
//! uses the d-dimensional schedule h = c1 T^{-1/(2k+d)} and the same density
//! values as the additive fit.
Comparison compare_full_vs_additive(const RateStudyConfig& config);

} // namespace margint
