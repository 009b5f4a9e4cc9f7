#include "margint/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace margint {

std::vector<Eigen::VectorXd>
default_eval_points(int d)
{
  if (d < 1)
    throw std::invalid_argument("default_eval_points: d must be >= 1");
  std::vector<Eigen::VectorXd> points(5, Eigen::VectorXd::Zero(d));
  for (int j = 0; j < d; ++j) {
    points[1](j) = 0.5;
    points[2](j) = -0.5;
    points[3](j) = j % 2 == 0 ? 0.5 : -0.5;
    points[4](j) = j % 2 == 0 ? -0.5 : 0.5;
  }
  return points;
}

void
validate(const RateStudyConfig& config)
{
  const int d = config.simulation.d;
  if (config.T_ladder.size() < 3)
    throw std::invalid_argument("T_ladder: need at least 3 rungs");
  for (std::size_t i = 0; i < config.T_ladder.size(); ++i) {
    if (!(config.T_ladder[i] > 1.0))
      throw std::invalid_argument("T_ladder: every horizon must exceed 1");
    if (i > 0 && !(config.T_ladder[i] > config.T_ladder[i - 1]))
      throw std::invalid_argument("T_ladder: must be strictly increasing");
  }
  if (config.replicates < 1)
    throw std::invalid_argument("replicates: must be >= 1");
  if (config.fit.weights.dim() != d)
    throw std::invalid_argument("weights: dimension differs from simulation d");
  for (const auto& p : config.eval_points)
    if (p.size() != d)
      throw std::invalid_argument("eval_points: every point needs length d");
  if (config.sup_grid < 2 || !(config.sup_hi > config.sup_lo))
    throw std::invalid_argument("sup_grid: need >= 2 points on a nonempty range");
}

std::uint64_t
replicate_seed(std::uint64_t base_seed, std::size_t rung, int replicate)
{
  return base_seed + static_cast<std::uint64_t>(rung) * 1000000ULL +
         static_cast<std::uint64_t>(replicate);
}

bool
RateTable::ok() const
{
  return std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.failure.empty(); });
}

namespace {

struct ReplicateResult
{
  double additive = 0.0;
  double full = 0.0;
  std::uint64_t evaluations = 0;
  std::uint64_t clamped = 0;
  std::string failure;
};

double
squared_error_at(const std::vector<Eigen::VectorXd>& points, const AdditiveModelSpec& spec,
                 const std::function<double(const Eigen::VectorXd&)>& estimate)
{
  double sum = 0.0;
  for (const auto& x : points) {
    const double e = estimate(x) - true_regression(spec, x);
    sum += e * e;
  }
  return sum / static_cast<double>(points.size());
}

// sup over the tensor grid of |sum_l eta_l(x_l) + c - m(x)|; additive in x,
// so the per-axis component values are computed once
double
sup_error(const AdditiveEstimator& est, const AdditiveModelSpec& spec, int grid, double lo, double hi)
{
  const int d = spec.dim();
  const Eigen::VectorXd axis = uniform_grid(lo, hi, grid);
  Eigen::MatrixXd diff(grid, d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < grid; ++i)
      diff(i, l) = est.eta(l, axis(i)) - spec.components[static_cast<std::size_t>(l)].fn(axis(i));
  const double offset = est.constant() - spec.mu;

  double worst = 0.0;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  for (;;) {
    double e = offset;
    for (int l = 0; l < d; ++l)
      e += diff(cur[static_cast<std::size_t>(l)], l);
    worst = std::max(worst, std::abs(e));
    int l = d - 1;
    while (l >= 0 && ++cur[static_cast<std::size_t>(l)] == grid) {
      cur[static_cast<std::size_t>(l)] = 0;
      --l;
    }
    if (l < 0)
      return worst;
  }
}

ReplicateResult
run_replicate(const RateStudyConfig& config, const AdditiveModelSpec& spec,
              const std::vector<Eigen::VectorXd>& points, double horizon, std::uint64_t seed,
              bool with_full)
{
  ReplicateResult out;
  SimulationSettings sim = config.simulation;
  sim.horizon = horizon;
  const SampledPath path = simulate_path(sim, spec, seed);
  const AdditiveEstimator est(path, config.fit);
  out.evaluations = est.density().tally().evaluations();
  out.clamped = est.density().tally().clamped();

  if (config.mode() == BandwidthMode::uniform && !with_full) {
    out.additive = sup_error(est, spec, config.sup_grid, config.sup_lo, config.sup_hi);
  } else {
    out.additive = squared_error_at(points, spec, [&](const Eigen::VectorXd& x) { return est.evaluate(x); });
  }
  if (with_full) {
    const int d = path.dim();
    const double h = full_dimensional_bandwidth(config.fit.plan, path.horizon(), d);
    const RegressionEstimator full(path, config.fit.psi, make_regression_kernels(config.fit.k, d), h, h,
                                   est.regression().density_at_samples());
    out.full = squared_error_at(points, spec, [&](const Eigen::VectorXd& x) { return full.full(x); });
  }
  if (!std::isfinite(out.additive) || !std::isfinite(out.full))
    throw NumericalFailure("non-finite error statistic");
  return out;
}

RateRow
aggregate(double horizon, const std::vector<ReplicateResult>& results, bool use_full)
{
  RateRow row;
  row.horizon = horizon;
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (!results[r].failure.empty()) {
      row.failure = "T=" + std::to_string(horizon) + " replicate " + std::to_string(r) + ": " +
                    results[r].failure;
      row.error = std::numeric_limits<double>::quiet_NaN();
      row.spread = std::numeric_limits<double>::quiet_NaN();
      row.replicate_errors.clear();
      return row;
    }
    row.replicate_errors.push_back(use_full ? results[r].full : results[r].additive);
    row.density_evaluations += results[r].evaluations;
    row.density_clamped += results[r].clamped;
  }
  const double count = static_cast<double>(row.replicate_errors.size());
  double sum = 0.0;
  for (double e : row.replicate_errors)
    sum += e;
  row.error = sum / count;
  double ss = 0.0;
  for (double e : row.replicate_errors)
    ss += (e - row.error) * (e - row.error);
  row.spread = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  row.clamp_rate = row.density_evaluations > 0
                     ? static_cast<double>(row.density_clamped) / static_cast<double>(row.density_evaluations)
                     : 0.0;
  return row;
}

std::vector<std::vector<ReplicateResult>>
run_all(const RateStudyConfig& config, bool with_full)
{
  validate(config);
  const AdditiveModelSpec spec = make_model(config.simulation.model, config.simulation.d);
  const auto points = config.eval_points.empty() ? default_eval_points(config.simulation.d) : config.eval_points;
  const std::size_t rungs = config.T_ladder.size();
  const int reps = config.replicates;
  std::vector<std::vector<ReplicateResult>> results(rungs, std::vector<ReplicateResult>(static_cast<std::size_t>(reps)));

  // largest horizons first so the long jobs start early
  const long total = static_cast<long>(rungs) * reps;
  const int threads = config.threads;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (long job = 0; job < total; ++job) {
    const std::size_t rung = rungs - 1 - static_cast<std::size_t>(job / reps);
    const int r = static_cast<int>(job % reps);
    auto& slot = results[rung][static_cast<std::size_t>(r)];
    try {
      slot = run_replicate(config, spec, points, config.T_ladder[rung],
                           replicate_seed(config.base_seed, rung, r), with_full);
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  }
  return results;
}

} // namespace

RateTable
run_rate_study(const RateStudyConfig& config)
{
  const auto results = run_all(config, false);
  RateTable table;
  table.mode = config.mode();
  for (std::size_t i = 0; i < results.size(); ++i)
    table.rows.push_back(aggregate(config.T_ladder[i], results[i], false));
  return table;
}

Comparison
compare_full_vs_additive(const RateStudyConfig& config)
{
  if (config.simulation.d < 2)
    throw std::invalid_argument("compare: needs d >= 2");
  RateStudyConfig mse = config;
  mse.fit.plan.mode = BandwidthMode::mse;
  const auto results = run_all(mse, true);
  Comparison out;
  out.additive.mode = out.full.mode = BandwidthMode::mse;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.additive.rows.push_back(aggregate(mse.T_ladder[i], results[i], false));
    out.full.rows.push_back(aggregate(mse.T_ladder[i], results[i], true));
  }
  if (!out.additive.ok())
    throw NumericalFailure("compare: " + out.additive.rows[0].failure);
  out.slope_additive = rate_slope(out.additive, BandwidthMode::mse);
  out.slope_full = rate_slope(out.full, BandwidthMode::mse);
  return out;
}

SlopeFit
rate_slope(const RateTable& table, BandwidthMode mode)
{
  const std::size_t n = table.rows.size();
  if (n < 3)
    throw std::invalid_argument("rate_slope: need at least 3 rungs, got " + std::to_string(n));
  Eigen::VectorXd x(static_cast<Eigen::Index>(n)), y(static_cast<Eigen::Index>(n)),
    var_y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    if (!row.failure.empty())
      throw NumericalFailure("rate_slope: rung failed: " + row.failure);
    if (!(row.error > 0.0))
      throw NumericalFailure("rate_slope: nonpositive error at T=" + std::to_string(row.horizon));
    const double T = row.horizon;
    if (mode == BandwidthMode::uniform) {
      if (!(T > 1.0))
        throw std::invalid_argument("rate_slope: uniform mode needs T > 1");
      x(static_cast<Eigen::Index>(i)) = std::log(T / std::log(T));
    } else {
      x(static_cast<Eigen::Index>(i)) = std::log(T);
    }
    y(static_cast<Eigen::Index>(i)) = std::log(row.error);
    // delta method: var(log mean) = var(mean) / mean^2
    const double reps = std::max<double>(1.0, static_cast<double>(row.replicate_errors.size()));
    const double rel = row.spread / (row.error * std::sqrt(reps));
    var_y(static_cast<Eigen::Index>(i)) = rel * rel;
  }
  const Eigen::VectorXd dx = x.array() - x.mean();
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0))
    throw std::invalid_argument("rate_slope: horizons must not all coincide");

  SlopeFit fit;
  fit.slope = dx.dot(y) / sxx;
  fit.intercept = y.mean() - fit.slope * x.mean();
  const Eigen::VectorXd resid = (y.array() - fit.intercept - fit.slope * x.array()).matrix();
  fit.ols_se = std::sqrt(resid.squaredNorm() / static_cast<double>(n - 2) / sxx);
  fit.sampling_se = std::sqrt(dx.cwiseAbs2().dot(var_y)) / sxx;
  fit.slope_se = std::hypot(fit.ols_se, fit.sampling_se);
  return fit;
}

double
theoretical_slope(BandwidthMode mode, int k)
{
  const double r = static_cast<double>(k) / (2.0 * k + 1.0);
  return mode == BandwidthMode::mse ? -2.0 * r : -r;
}

} // namespace margint
