#include "margint/neighbor_index.hpp"

#include <stdexcept>
#include <string>

namespace margint {

namespace {
constexpr double kMaxCells = 1 << 22;
}

NeighborIndex::NeighborIndex(const PathMatrix& points, double cell_width)
  : width_(cell_width)
{
  const int d = static_cast<int>(points.cols());
  const Eigen::Index n = points.rows();
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("NeighborIndex: dimension must lie in [1, " +
                                std::to_string(kMaxDim) + "]");
  if (!(cell_width > 0.0))
    throw std::invalid_argument("NeighborIndex: cell width must be positive");

  lower_.resize(static_cast<std::size_t>(d));
  std::vector<double> extent(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    lower_[j] = n > 0 ? points.col(j).minCoeff() : 0.0;
    extent[j] = n > 0 ? points.col(j).maxCoeff() - lower_[j] : 0.0;
  }
  // coarsen until the dense cell array stays bounded
  for (;;) {
    double total = 1.0;
    for (int j = 0; j < d; ++j)
      total *= std::floor(extent[j] / width_) + 1.0;
    if (total <= kMaxCells)
      break;
    width_ *= 2.0;
  }
  counts_.resize(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    counts_[j] = static_cast<int>(std::floor(extent[j] / width_)) + 1;
    total *= static_cast<std::size_t>(counts_[j]);
  }

  std::vector<std::size_t> cell_of(static_cast<std::size_t>(n));
  start_.assign(total + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t cell = 0;
    for (int j = 0; j < d; ++j) {
      int c = static_cast<int>(std::floor((points(i, j) - lower_[j]) / width_));
      c = std::clamp(c, 0, counts_[j] - 1);
      cell = cell * static_cast<std::size_t>(counts_[j]) + static_cast<std::size_t>(c);
    }
    cell_of[static_cast<std::size_t>(i)] = cell;
    ++start_[cell + 1];
  }
  for (std::size_t c = 0; c < total; ++c)
    start_[c + 1] += start_[c];
  order_.resize(static_cast<std::size_t>(n));
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (Eigen::Index i = 0; i < n; ++i)
    order_[fill[cell_of[static_cast<std::size_t>(i)]]++] = i;
  coords_.resize(n, d);
  for (Eigen::Index p = 0; p < n; ++p)
    coords_.row(p) = points.row(order_[static_cast<std::size_t>(p)]);
}

} // namespace margint
