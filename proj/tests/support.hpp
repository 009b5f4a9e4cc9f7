#pragma once

#include "margint/process.hpp"

#include <Eigen/Dense>

namespace support {

//! A path that sits at x for n grid points with constant response y.
inline margint::SampledPath
constant_path(const Eigen::VectorXd& x, double y, Eigen::Index n = 3, double step = 1.0)
{
  margint::PathMatrix cov(n, x.size());
  for (Eigen::Index i = 0; i < n; ++i)
    cov.row(i) = x.transpose();
  return margint::SampledPath(step, cov, Eigen::VectorXd::Constant(n, y));
}

inline Eigen::VectorXd
vec(std::initializer_list<double> values)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values)
    v(i++) = x;
  return v;
}

} // namespace support
