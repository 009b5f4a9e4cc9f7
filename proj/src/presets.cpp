#include "margint/presets.hpp"

#include "margint/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace margint {

namespace {

const std::vector<AdditiveComponent>&
paper_desk_components()
{
  static const std::vector<AdditiveComponent> components = {
    { "square", [](double x) { return x * x; } },
    { "sin_pi", [](double x) { return std::sin(std::numbers::pi * x); } },
    { "cube", [](double x) { return x * x * x; } },
    { "cos_pi", [](double x) { return std::cos(std::numbers::pi * x); } },
  };
  return components;
}

} // namespace

std::vector<std::string>
model_names()
{
  return { "paper-desk", "linear" };
}

AdditiveModelSpec
make_model(const std::string& name, int d)
{
  if (d < 1)
    throw std::invalid_argument("make_model: d must be >= 1");
  AdditiveModelSpec spec;
  if (name == "paper-desk") {
    const auto& all = paper_desk_components();
    if (d > static_cast<int>(all.size()))
      throw std::invalid_argument("make_model: paper-desk supports d <= " +
                                  std::to_string(all.size()));
    spec.mu = 1.0;
    spec.components.assign(all.begin(), all.begin() + d);
  } else if (name == "linear") {
    spec.mu = 0.0;
    spec.components.assign(static_cast<std::size_t>(d), { "identity", [](double x) { return x; } });
  } else {
    throw std::invalid_argument("unknown model preset '" + name + "'");
  }
  return spec;
}

SampledPath
simulate_path(const SimulationSettings& settings, const AdditiveModelSpec& spec, std::uint64_t seed)
{
  PathMatrix x = simulate_ou_covariates(settings.d, settings.horizon, settings.step, settings.ou,
                                        mix_seed(seed, 0));
  x *= settings.scale;
  return attach_response(x, settings.step, spec, settings.noise_sigma, settings.noise_theta,
                         mix_seed(seed, 1));
}

double
simulated_density(const SimulationSettings& settings, const Eigen::Ref<const Eigen::VectorXd>& x)
{
  return ou_stationary_density(x, settings.ou, settings.scale);
}

} // namespace margint
