#pragma once

#include "margint/process.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace margint {

//! Additive model family selected by name.
//!
//! "paper-desk": mu = 1 with components taken in order from
//!   x^2, sin(pi x), x^3, cos(pi x)
//! (d = 2 gives m_1 = x^2, m_2 = sin(pi x)).
//! "linear": mu = 0 and m_l(x) = x for every axis.
AdditiveModelSpec make_model(const std::string& name, int d);

std::vector<std::string> model_names();

//! How a path is simulated: scale * OU covariates plus an additive response
//! with OU noise.
struct SimulationSettings
{
  int d = 2;
  double horizon = 1000.0;
  double step = 0.05;
  OUParams ou{};
  double scale = 0.5;
  double noise_sigma = 0.3;
  double noise_theta = 1.0;
  std::string model = "paper-desk";
  std::uint64_t seed = 1;
};

//! Covariates use the stream mix_seed(seed, 0), response noise mix_seed(seed, 1).
SampledPath simulate_path(const SimulationSettings& settings, const AdditiveModelSpec& spec,
                          std::uint64_t seed);

//! Stationary covariate density of the simulated process.
double simulated_density(const SimulationSettings& settings, const Eigen::Ref<const Eigen::VectorXd>& x);

} // namespace margint
