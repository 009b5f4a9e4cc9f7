#include "margint/integration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace margint {

WeightDensity::WeightDensity(double lo, double hi, int smoothness)
  : lo_(lo)
  , hi_(hi)
  , smoothness_(smoothness)
{
  if (!(hi > lo))
    throw std::invalid_argument("WeightDensity: support must satisfy lo < hi");
  if (smoothness < 1)
    throw std::invalid_argument("WeightDensity: smoothness must be >= 1");
  // int_{-1}^{1} (1 - u^2)^s du = sqrt(pi) Gamma(s + 1) / Gamma(s + 3/2)
  const double s = smoothness;
  const double log_mass = 0.5 * std::log(std::numbers::pi) + std::lgamma(s + 1.0) - std::lgamma(s + 1.5);
  norm_ = 1.0 / (0.5 * (hi - lo) * std::exp(log_mass));
}

double
WeightDensity::operator()(double x) const
{
  if (x <= lo_ || x >= hi_)
    return 0.0;
  const double u = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
  return norm_ * std::pow(1.0 - u * u, smoothness_);
}

WeightSystem::WeightSystem(std::vector<WeightDensity> weights, int nodes_per_axis)
  : weights_(std::move(weights))
  , nodes_(nodes_per_axis)
{
  if (weights_.empty())
    throw std::invalid_argument("WeightSystem: need at least one weight density");
  const auto base = gauss_legendre<double>(nodes_per_axis);
  for (const auto& q : weights_) {
    auto rule = base.rescaled(q.lo(), q.hi());
    for (Eigen::Index i = 0; i < rule.size(); ++i)
      rule.weights(i) *= q(rule.nodes(i));
    rules_.push_back(std::move(rule));
  }
}

WeightSystem
WeightSystem::symmetric(int d, double lo, double hi, int smoothness, int nodes_per_axis)
{
  if (d < 1)
    throw std::invalid_argument("WeightSystem: d must be >= 1");
  return WeightSystem(std::vector<WeightDensity>(static_cast<std::size_t>(d),
                                                 WeightDensity(lo, hi, smoothness)),
                      nodes_per_axis);
}

double
WeightSystem::q(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  if (x.size() != dim())
    throw std::invalid_argument("WeightSystem::q: point length mismatch");
  double value = 1.0;
  for (int j = 0; j < dim(); ++j)
    value *= weights_[static_cast<std::size_t>(j)](x(j));
  return value;
}

double
WeightSystem::q_minus(int axis, const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  detail::check_axis(*this, axis);
  if (x.size() != dim())
    throw std::invalid_argument("WeightSystem::q_minus: point length mismatch");
  double value = 1.0;
  for (int j = 0; j < dim(); ++j)
    if (j != axis)
      value *= weights_[static_cast<std::size_t>(j)](x(j));
  return value;
}

double
true_eta(const AdditiveModelSpec& spec, const WeightSystem& w, int axis, double x_l)
{
  detail::check_axis(w, axis);
  if (spec.dim() != w.dim())
    throw std::invalid_argument("true_eta: model and weights differ in dimension");
  const auto& m = spec.components[static_cast<std::size_t>(axis)].fn;
  return m(x_l) - w.rule(axis).integrate(m);
}

namespace {

// sum_i w_i K((z_i - u) / h) / h over a q-weighted rule
Eigen::VectorXd
smoothed_weight(const Kernel1D& kernel, double h, const QuadratureRule<double>& rule,
                const Eigen::Ref<const Eigen::VectorXd>& coords)
{
  const double inv_h = 1.0 / h;
  Eigen::VectorXd out(coords.size());
  for (Eigen::Index t = 0; t < coords.size(); ++t) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i)
      sum += rule.weights(i) * kernel((rule.nodes(i) - coords(t)) * inv_h);
    out(t) = sum * inv_h;
  }
  return out;
}

} // namespace

MarginalIntegrator::MarginalIntegrator(const RegressionEstimator& estimator, const WeightSystem& weights)
  : h1_(estimator.h1())
  , k1_(estimator.kernels().k1)
{
  const int d = estimator.dim();
  if (weights.dim() != d)
    throw std::invalid_argument("MarginalIntegrator: weights have dimension " +
                                std::to_string(weights.dim()) + ", estimator " +
                                std::to_string(d));
  const auto& x = estimator.path().covariates();
  const auto& a = estimator.sample_weights();
  const Eigen::Index n = x.rows();
  const auto& kernels = estimator.kernels();

  // constant term from the full estimator
  Eigen::VectorXd full = a;
  for (int j = 0; j < d; ++j)
    full.array() *= smoothed_weight(kernels.k3.factor(j), h1_, weights.rule(j), x.col(j)).array();
  constant_ = full.sum();

  subtract_.resize(static_cast<std::size_t>(d));
  sorted_coord_.resize(static_cast<std::size_t>(d));
  sorted_weight_.resize(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) {
    Eigen::VectorXd loo = a;
    for (int j = 0, f = 0; j < d; ++j) {
      if (j == l)
        continue;
      loo.array() *=
        smoothed_weight(kernels.k2.factor(f++), estimator.h2(), weights.rule(j), x.col(j)).array();
    }
    const Eigen::VectorXd g1 = smoothed_weight(k1_, h1_, weights.rule(l), x.col(l));
    subtract_[static_cast<std::size_t>(l)] = loo.cwiseProduct(g1).sum();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index p, Eigen::Index q) { return x(p, l) < x(q, l); });
    auto& coord = sorted_coord_[static_cast<std::size_t>(l)];
    auto& weight = sorted_weight_[static_cast<std::size_t>(l)];
    coord.resize(n);
    weight.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      coord(i) = x(order[static_cast<std::size_t>(i)], l);
      weight(i) = loo(order[static_cast<std::size_t>(i)]);
    }
  }
}

double
MarginalIntegrator::eta(int axis, double x_l) const
{
  if (axis < 0 || axis >= dim())
    throw std::out_of_range("MarginalIntegrator: axis " + std::to_string(axis) + " out of range");
  const auto& coord = sorted_coord_[static_cast<std::size_t>(axis)];
  const auto& weight = sorted_weight_[static_cast<std::size_t>(axis)];
  const double reach = k1_.support_radius() * h1_;
  const double inv_h = 1.0 / h1_;
  const double* begin = coord.data();
  const double* end = begin + coord.size();
  const double* it = std::lower_bound(begin, end, x_l - reach);
  double sum = 0.0;
  for (; it != end && *it <= x_l + reach; ++it)
    sum += weight(it - begin) * k1_((x_l - *it) * inv_h);
  return sum * inv_h - subtract_[static_cast<std::size_t>(axis)];
}

double
MarginalIntegrator::directional_constant(int axis) const
{
  if (axis < 0 || axis >= dim())
    throw std::out_of_range("MarginalIntegrator: axis " + std::to_string(axis) + " out of range");
  return subtract_[static_cast<std::size_t>(axis)];
}

double
MarginalIntegrator::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  if (x.size() != dim())
    throw std::invalid_argument("MarginalIntegrator::evaluate: point length mismatch");
  double value = constant_;
  for (int l = 0; l < dim(); ++l)
    value += eta(l, x(l));
  return value;
}

double
AdditiveFit::component(int axis, double x_l) const
{
  if (axis < 0 || axis >= dim())
    throw std::out_of_range("AdditiveFit: axis " + std::to_string(axis) + " out of range");
  const Eigen::Index m = grid.size();
  if (m == 1)
    return eta(0, axis);
  double pos = (x_l - grid_lo) / (grid_hi - grid_lo) * static_cast<double>(m - 1);
  pos = std::clamp(pos, 0.0, static_cast<double>(m - 1));
  const auto i = std::min(static_cast<Eigen::Index>(pos), m - 2);
  const double frac = pos - static_cast<double>(i);
  return eta(i, axis) + frac * (eta(i + 1, axis) - eta(i, axis));
}

double
AdditiveFit::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  if (x.size() != dim())
    throw std::invalid_argument("AdditiveFit::evaluate: point length mismatch");
  double value = constant;
  for (int l = 0; l < dim(); ++l)
    value += component(l, x(l));
  return value;
}

Eigen::VectorXd
uniform_grid(double lo, double hi, int points)
{
  if (points < 2 || !(hi > lo))
    throw std::invalid_argument("uniform_grid: need at least 2 points on a nonempty interval");
  Eigen::VectorXd g(points);
  for (int i = 0; i < points; ++i)
    g(i) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

AdditiveFit
tabulate(const MarginalIntegrator& integrator, double lo, double hi, int points)
{
  AdditiveFit fit;
  fit.grid_lo = lo;
  fit.grid_hi = hi;
  fit.grid = uniform_grid(lo, hi, points);
  fit.eta.resize(points, integrator.dim());
  for (int l = 0; l < integrator.dim(); ++l)
    for (int i = 0; i < points; ++i)
      fit.eta(i, l) = integrator.eta(l, fit.grid(i));
  fit.constant = integrator.constant();
  return fit;
}

double
marginal_component(const RegressionEstimator& estimator, const WeightSystem& w, int axis, double x_l)
{
  detail::check_axis(w, axis);
  return MarginalIntegrator(estimator, w).eta(axis, x_l);
}

double
constant_term(const RegressionEstimator& estimator, const WeightSystem& w)
{
  return MarginalIntegrator(estimator, w).constant();
}

AdditiveEstimator::AdditiveEstimator(const SampledPath& path, const FitConfig& config)
  : path_(&path)
  , config_(config)
{
  const int d = path.dim();
  if (config.weights.dim() != d)
    throw std::invalid_argument("fit: weight system has dimension " +
                                std::to_string(config.weights.dim()) + ", path has " +
                                std::to_string(d));
  if (config.plan.k != config.k)
    throw std::invalid_argument("fit: bandwidth plan order differs from kernel order");
  const double horizon = path.horizon();
  const double h_density = density_bandwidth(horizon, config.k_prime, d, config.c_prime);
  density_ = std::make_unique<DensityEstimate>(path, product_kernel(make_kernel(config.k_prime), d),
                                               h_density, config.density_floor);
  const auto bw = regression_bandwidths(config.plan, horizon);
  regression_ = std::make_unique<RegressionEstimator>(path, config.psi, make_regression_kernels(config.k, d),
                                                      bw.h1, bw.h2, *density_);
  integrator_ = std::make_unique<MarginalIntegrator>(*regression_, config.weights);
}

AdditiveFit
AdditiveEstimator::tabulate() const
{
  AdditiveFit fit = margint::tabulate(*integrator_, config_.region_lo, config_.region_hi,
                                      config_.grid_points);
  fit.meta.horizon = path_->horizon();
  fit.meta.h1 = regression_->h1();
  fit.meta.h2 = regression_->h2();
  fit.meta.density_bandwidth = density_->bandwidth();
  fit.meta.density_evaluations = density_->tally().evaluations();
  fit.meta.density_clamped = density_->tally().clamped();
  return fit;
}

AdditiveFit
fit_additive(const SampledPath& path, const FitConfig& config)
{
  return AdditiveEstimator(path, config).tabulate();
}

} // namespace margint
