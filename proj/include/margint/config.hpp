#pragma once

#include "margint/experiment.hpp"
#include "margint/integration.hpp"
#include "margint/presets.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace margint {

inline constexpr const char* kConfigVersion = "margint-config/1";

//! Invalid configuration; the message starts with the dotted key at fault.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! All run settings, one struct per JSON section. Defaults are the values a
//! member has here; see README for the JSON layout.
struct RunConfig
{
  std::string version = kConfigVersion;

  struct Simulate
  {
    int d = 2;
    double horizon = 1000.0;
    double step = 0.05;
    double theta = 1.0;
    double sigma = 1.4142135623730951;
    double scale = 0.5;
    std::string x0_law = "stationary";
    double noise_sigma = 0.3;
    double noise_theta = 1.0;
    std::uint64_t seed = 1;
    std::string model = "paper-desk";
    bool operator==(const Simulate&) const = default;
  } simulate;

  struct Kernels
  {
    int k = 2;
    int k_prime = 6;
    bool operator==(const Kernels&) const = default;
  } kernels;

  struct Bandwidths
  {
    std::string mode = "mse";
    double c1 = 1.0;
    double c2 = 1.0;
    double c_prime = 0.5;
    bool operator==(const Bandwidths&) const = default;
  } bandwidths;

  struct Density
  {
    double floor = 1e-3;
    double delta = 0.25;
    bool operator==(const Density&) const = default;
  } density;

  struct PsiSection
  {
    std::string kind = "clip";
    double bound = 50.0;
    bool operator==(const PsiSection&) const = default;
  } psi;

  struct Weights
  {
    double lo = -0.9;
    double hi = 0.9;
    int smoothness = 3; //!< defaults to kernels.k + 1 when absent
    int nodes = 16;
    bool operator==(const Weights&) const = default;
  } weights;

  struct Fit
  {
    int grid_points = 41;
    double region_lo = -1.0;
    double region_hi = 1.0;
    bool operator==(const Fit&) const = default;
  } fit;

  struct Experiment
  {
    std::vector<double> T_ladder{ 250.0, 500.0, 1000.0, 2000.0, 4000.0 };
    int replicates = 50;
    std::uint64_t base_seed = 20240601;
    int sup_grid = 21;
    double sup_lo = -0.9;
    double sup_hi = 0.9;
    std::vector<std::vector<double>> eval_points; //!< empty: default_eval_points(d)
    int threads = 0;
    bool operator==(const Experiment&) const = default;
  } experiment;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);
//! Canonical JSON with every default filled in.
nlohmann::json dump_config(const RunConfig& config);

BandwidthMode parse_mode(const std::string& text);
std::string to_string(BandwidthMode mode);

SimulationSettings simulation_settings(const RunConfig& config);
FitConfig fit_config(const RunConfig& config);
RateStudyConfig rate_study_config(const RunConfig& config);

} // namespace margint
