#include "margint/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace margint {

namespace {

// sum_p w_p prod_j max(1 - u_j^2 / r_j^2, 0) Q_j(u_j^2) over one contiguous
// range, with the dimension and polynomial length fixed at compile time. The
// max() form keeps the loop free of data-dependent branches.
template <int D, int M>
double
even_range_sum(const NeighborIndex& index, const Eigen::VectorXd& w, const double* x,
               const double* coeffs, const double* inv_support_sq, double inv_h, Eigen::Index begin,
               Eigen::Index end)
{
  // four independent partial sums, combined in a fixed order
  double acc[4] = { 0.0, 0.0, 0.0, 0.0 };
  auto term = [&](Eigen::Index p) {
    const double* row = index.point(p);
    double value = w(p);
    for (int j = 0; j < D; ++j) {
      const double u = (x[j] - row[j]) * inv_h;
      const double u2 = u * u;
      const double* c = coeffs + j * M;
      double poly = c[M - 1];
      for (int k = M - 2; k >= 0; --k)
        poly = poly * u2 + c[k];
      value *= std::max(1.0 - u2 * inv_support_sq[j], 0.0) * poly;
    }
    return value;
  };
  Eigen::Index p = begin;
  for (; p + 4 <= end; p += 4) {
    acc[0] += term(p);
    acc[1] += term(p + 1);
    acc[2] += term(p + 2);
    acc[3] += term(p + 3);
  }
  for (; p < end; ++p)
    acc[0] += term(p);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

template <int D, int M>
double
even_box_sum(const NeighborIndex& index, const Eigen::VectorXd& w, const double* x,
             const double* radius, const double* coeffs, const double* inv_support_sq, double inv_h)
{
  double sum = 0.0;
  index.for_each_candidate_range(x, radius, [&](Eigen::Index begin, Eigen::Index end) {
    sum += even_range_sum<D, M>(index, w, x, coeffs, inv_support_sq, inv_h, begin, end);
  });
  return sum;
}

using EvenBoxSum = double (*)(const NeighborIndex&, const Eigen::VectorXd&, const double*,
                              const double*, const double*, const double*, double);

template <int D>
EvenBoxSum
pick_length(Eigen::Index m)
{
  switch (m) {
    case 1: return &even_box_sum<D, 1>;
    case 2: return &even_box_sum<D, 2>;
    case 3: return &even_box_sum<D, 3>;
    case 4: return &even_box_sum<D, 4>;
    case 5: return &even_box_sum<D, 5>;
    default: return nullptr;
  }
}

EvenBoxSum
pick_even_box_sum(int d, Eigen::Index m)
{
  switch (d) {
    case 1: return pick_length<1>(m);
    case 2: return pick_length<2>(m);
    case 3: return pick_length<3>(m);
    case 4: return pick_length<4>(m);
    default: return nullptr;
  }
}

} // namespace

double
density_bandwidth(double horizon, int k_prime, int d, double c_prime)
{
  if (!(horizon > 1.0))
    throw std::invalid_argument("density_bandwidth: horizon must exceed 1, got " +
                                std::to_string(horizon));
  if (!(c_prime > 0.0))
    throw std::invalid_argument("density_bandwidth: c_prime must be positive");
  if (k_prime < 1 || d < 1)
    throw std::invalid_argument("density_bandwidth: k_prime and d must be positive");
  return c_prime * std::pow(std::log(horizon) / horizon, 1.0 / (2.0 * k_prime + d));
}

DensityEstimate::DensityEstimate(const SampledPath& path, ProductKernelD kernel, double bandwidth,
                                 double floor)
  : path_(&path)
  , kernel_(std::move(kernel))
  , bandwidth_(bandwidth)
  , floor_(floor)
  , tally_(std::make_shared<ClampTally>())
{
  if (!(bandwidth_ > 0.0))
    throw std::invalid_argument("DensityEstimate: bandwidth must be positive");
  if (!(floor_ > 0.0))
    throw std::invalid_argument("DensityEstimate: floor must be positive");
  if (kernel_.dim() != path.dim())
    throw std::invalid_argument("DensityEstimate: kernel dimension " +
                                std::to_string(kernel_.dim()) + " != path dimension " +
                                std::to_string(path.dim()));
  double reach = 0.0;
  for (const auto& f : kernel_.factors())
    reach = std::max(reach, f.support_radius());
  index_ = std::make_shared<NeighborIndex>(path.covariates(), 0.5 * reach * bandwidth_);
  position_weights_.resize(path.size());
  for (Eigen::Index p = 0; p < path.size(); ++p)
    position_weights_(p) = path.time_weights()(index_->original(p));

  bool all_even = true;
  Eigen::Index width = 0;
  for (const auto& f : kernel_.factors()) {
    all_even = all_even && f.vanishes_at_edge();
    width = std::max(width, f.edge_quotient().size());
  }
  if (all_even && pick_even_box_sum(kernel_.dim(), width) != nullptr) {
    const int d = kernel_.dim();
    even_sum_ = pick_even_box_sum(d, width);
    // row-major copy: factor j's coefficients are contiguous
    even_table_ = Eigen::MatrixXd::Zero(width, d);
    inv_support_sq_.resize(d);
    for (int j = 0; j < d; ++j) {
      const auto& c = kernel_.factor(j).edge_quotient();
      even_table_.col(j).head(c.size()) = c;
      const double r = kernel_.factor(j).support_radius();
      inv_support_sq_(j) = 1.0 / (r * r);
    }
  }
}


double
DensityEstimate::dispatch_even_sum(const double* x, const double* radius, double inv_h) const
{
  return even_sum_(*index_, position_weights_, x, radius, even_table_.data(), inv_support_sq_.data(),
                   inv_h);
}

double
DensityEstimate::raw_at(const double* x) const
{
  const int d = kernel_.dim();
  const auto& w = position_weights_;
  const double inv_h = 1.0 / bandwidth_;
  double radius[NeighborIndex::kMaxDim];
  for (int j = 0; j < d; ++j)
    radius[j] = kernel_.factor(j).support_radius() * bandwidth_;

  double sum = 0.0;
  if (even_sum_ != nullptr) {
    sum = dispatch_even_sum(x, radius, inv_h);
  } else {
    index_->for_each_candidate(x, radius, [&](Eigen::Index p) {
      const double* row = index_->point(p);
      double value = w(p);
      for (int j = 0; j < d && value != 0.0; ++j)
        value *= kernel_.factor(j)((x[j] - row[j]) * inv_h);
      sum += value;
    });
  }
  return sum / std::pow(bandwidth_, d);
}

double
DensityEstimate::raw(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  if (x.size() != kernel_.dim())
    throw std::invalid_argument("DensityEstimate: point has length " + std::to_string(x.size()));
  const Eigen::VectorXd copy = x;
  return raw_at(copy.data());
}

double
DensityEstimate::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
  const double value = raw(x);
  const bool clamped = !(value >= floor_);
  tally_->record(1, clamped ? 1 : 0);
  return clamped ? floor_ : value;
}

Eigen::VectorXd
DensityEstimate::at_samples() const
{
  const Eigen::Index n = path_->size();
  const auto& pts = path_->covariates();
  Eigen::VectorXd out(n);
  std::uint64_t clamped = 0;
#pragma omp parallel for schedule(dynamic, 512) reduction(+ : clamped)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double value = raw_at(pts.data() + i * pts.cols());
    if (!(value >= floor_)) {
      out(i) = floor_;
      ++clamped;
    } else {
      out(i) = value;
    }
  }
  tally_->record(static_cast<std::uint64_t>(n), clamped);
  return out;
}

} // namespace margint
