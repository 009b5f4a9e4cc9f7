#pragma once

#include "margint/process.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace margint {

//! Uniform cell grid over the sample points of a path, used to visit only
//! the samples near an axis-aligned box. Points are stored contiguously in
//! cell order (lexicographic cells, increasing time index inside a cell), and
//! every traversal follows that order, so sums over visited points are
//! deterministic.
class NeighborIndex
{
public:
  NeighborIndex(const PathMatrix& points, double cell_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  double cell_width() const { return width_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(order_.size()); }

  //! Coordinates of the point at storage position p.
  const double* point(Eigen::Index p) const { return coords_.data() + p * coords_.cols(); }
  //! Time index of the point at storage position p.
  Eigen::Index original(Eigen::Index p) const { return order_[static_cast<std::size_t>(p)]; }

  //! Calls visit(p) for the storage position p of every point that may lie in
  //! [center - radius, center + radius]. Callers must still test the box.
  template <typename Visitor>
  void for_each_candidate(const double* center, const double* radius, Visitor&& visit) const
  {
    for_each_candidate_range(center, radius, [&](Eigen::Index begin, Eigen::Index end) {
      for (Eigen::Index p = begin; p < end; ++p)
        visit(p);
    });
  }

  //! As for_each_candidate, but hands over contiguous position ranges
  //! [begin, end).
  template <typename Visitor>
  void for_each_candidate_range(const double* center, const double* radius, Visitor&& visit) const
  {
    const int d = dim();
    int first[kMaxDim], last[kMaxDim], cur[kMaxDim];
    for (int j = 0; j < d; ++j) {
      const double a = std::floor((center[j] - radius[j] - lower_[j]) / width_);
      const double b = std::floor((center[j] + radius[j] - lower_[j]) / width_);
      if (b < 0.0 || a > static_cast<double>(counts_[j] - 1))
        return;
      first[j] = static_cast<int>(std::max(a, 0.0));
      last[j] = static_cast<int>(std::min(b, static_cast<double>(counts_[j] - 1)));
      cur[j] = first[j];
    }
    // the innermost axis is contiguous in storage, so each row of cells is
    // one range of positions
    const int inner = d - 1;
    for (;;) {
      std::size_t row = 0;
      for (int j = 0; j < inner; ++j)
        row = row * static_cast<std::size_t>(counts_[j]) + static_cast<std::size_t>(cur[j]);
      row *= static_cast<std::size_t>(counts_[inner]);
      const auto begin = start_[row + static_cast<std::size_t>(first[inner])];
      const auto end = start_[row + static_cast<std::size_t>(last[inner]) + 1];
      if (begin < end)
        visit(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end));
      int j = inner - 1;
      while (j >= 0 && cur[j] == last[j]) {
        cur[j] = first[j];
        --j;
      }
      if (j < 0)
        return;
      ++cur[j];
    }
  }

  static constexpr int kMaxDim = 8;

private:
  std::vector<double> lower_;
  std::vector<int> counts_;
  double width_;
  std::vector<std::size_t> start_;
  std::vector<Eigen::Index> order_;
  PathMatrix coords_;
};

} // namespace margint
