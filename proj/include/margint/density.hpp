#pragma once

#include "margint/kernel.hpp"
#include "margint/neighbor_index.hpp"
#include "margint/process.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <memory>

namespace margint {

//! c' (log T / T)^{1/(2k' + d)}.
double density_bandwidth(double horizon, int k_prime, int d, double c_prime);

//! Counts of density evaluations and of those that hit the floor. Safe to
//! bump from concurrent evaluations.
class ClampTally
{
public:
  void record(std::uint64_t evaluations, std::uint64_t clamped)
  {
    evaluations_.fetch_add(evaluations, std::memory_order_relaxed);
    clamped_.fetch_add(clamped, std::memory_order_relaxed);
  }
  std::uint64_t evaluations() const { return evaluations_.load(); }
  std::uint64_t clamped() const { return clamped_.load(); }
  void reset()
  {
    evaluations_ = 0;
    clamped_ = 0;
  }

private:
  std::atomic<std::uint64_t> evaluations_{ 0 };
  std::atomic<std::uint64_t> clamped_{ 0 };
};

//! Kernel estimate of the covariate density,
//!   f_T(x) = (1 / h^d) (1/T) int_0^T K((x - X_s) / h) ds,
//! returned as max(floor, f_T(x)) so that it can be divided by.
//!
//! Holds a reference to the path, which must outlive the estimate.
class DensityEstimate
{
public:
  DensityEstimate(const SampledPath& path, ProductKernelD kernel, double bandwidth, double floor);

  const SampledPath& path() const { return *path_; }
  const ProductKernelD& kernel() const { return kernel_; }
  double bandwidth() const { return bandwidth_; }
  double floor() const { return floor_; }

  //! Unclamped estimate; does not touch the tally.
  double raw(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  //! Clamped estimate; counted in the tally.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  //! Clamped estimate at every sample point X_t, evaluated in parallel.
  //! Counted in the tally.
  Eigen::VectorXd at_samples() const;

  const ClampTally& tally() const { return *tally_; }
  void reset_tally() const { tally_->reset(); }

private:
  double raw_at(const double* x) const;
  double dispatch_even_sum(const double* x, const double* radius, double inv_h) const;

  const SampledPath* path_;
  ProductKernelD kernel_;
  double bandwidth_;
  double floor_;
  std::shared_ptr<const NeighborIndex> index_;
  Eigen::VectorXd position_weights_;
  // column j holds the edge quotient Q_j when every factor vanishes at its edge
  Eigen::MatrixXd even_table_;
  Eigen::VectorXd inv_support_sq_;
  double (*even_sum_)(const NeighborIndex&, const Eigen::VectorXd&, const double*, const double*,
                      const double*, const double*, double) = nullptr;
  std::shared_ptr<ClampTally> tally_;
};

} // namespace margint
