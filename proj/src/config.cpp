#include "margint/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace margint {

using nlohmann::json;

namespace {

[[noreturn]] void
fail(const std::string& key, const std::string& message)
{
  throw ConfigError(key + ": " + message);
}

// Reads the members of one JSON object and rejects the ones nobody asked for.
class SectionReader
{
public:
  SectionReader(const json& parent, std::string name)
    : name_(std::move(name))
  {
    if (parent.contains(name_)) {
      node_ = &parent.at(name_);
      if (!node_->is_object())
        fail(name_, "expected an object");
    }
  }

  std::string key(const std::string& member) const { return name_ + "." + member; }
  bool has(const std::string& member) const { return node_ != nullptr && node_->contains(member); }

  void read(const std::string& member, double& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_number())
        fail(key(member), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out))
        fail(key(member), "must be finite");
    }
  }

  void read(const std::string& member, int& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_number_integer())
        fail(key(member), "expected an integer");
      const auto value = v->get<std::int64_t>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
        fail(key(member), "integer out of range");
      out = static_cast<int>(value);
    }
  }

  void read(const std::string& member, std::uint64_t& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
        fail(key(member), "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& member, std::string& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_string())
        fail(key(member), "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& member, std::vector<double>& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_array())
        fail(key(member), "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number())
          fail(key(member), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void read_range(const std::string& member, double& lo, double& hi)
  {
    std::vector<double> pair{ lo, hi };
    read(member, pair);
    if (pair.size() != 2)
      fail(key(member), "expected [lo, hi]");
    lo = pair[0];
    hi = pair[1];
  }

  void read(const std::string& member, std::vector<std::vector<double>>& out)
  {
    if (const json* v = take(member)) {
      if (!v->is_array())
        fail(key(member), "expected an array of points");
      out.clear();
      for (const auto& p : *v) {
        if (!p.is_array())
          fail(key(member), "expected an array of points");
        std::vector<double> point;
        for (const auto& e : p) {
          if (!e.is_number())
            fail(key(member), "point coordinates must be numbers");
          point.push_back(e.get<double>());
        }
        out.push_back(std::move(point));
      }
    }
  }

  void finish() const
  {
    if (node_ == nullptr)
      return;
    for (const auto& item : node_->items())
      if (!seen_.contains(item.key()))
        fail(key(item.key()), "unknown key");
  }

private:
  const json* take(const std::string& member)
  {
    seen_.insert(member);
    if (node_ == nullptr || !node_->contains(member))
      return nullptr;
    return &node_->at(member);
  }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

void
require(bool ok, const std::string& key, const std::string& message)
{
  if (!ok)
    fail(key, message);
}

bool
is_kernel_order(int k)
{
  return k == 2 || k == 4 || k == 6;
}

void
validate(const RunConfig& c)
{
  const auto& s = c.simulate;
  require(s.d >= 1 && s.d <= 4, "simulate.d", "must lie in [1, 4]");
  require(s.horizon > 0.0, "simulate.horizon", "must be positive");
  require(s.step > 0.0, "simulate.step", "must be positive");
  require(std::llround(s.horizon / s.step) >= 1, "simulate.horizon", "horizon / step must give >= 2 grid points");
  require(s.theta > 0.0, "simulate.theta", "must be positive");
  require(s.sigma > 0.0, "simulate.sigma", "must be positive");
  require(s.scale > 0.0, "simulate.scale", "must be positive");
  require(s.x0_law == "stationary" || s.x0_law == "fixed", "simulate.x0_law",
          "must be \"stationary\" or \"fixed\"");
  require(s.noise_sigma >= 0.0, "simulate.noise_sigma", "must be nonnegative");
  require(s.noise_theta > 0.0, "simulate.noise_theta", "must be positive");
  {
    const auto names = model_names();
    require(std::find(names.begin(), names.end(), s.model) != names.end(), "simulate.model",
            "unknown model preset '" + s.model + "'");
  }

  require(is_kernel_order(c.kernels.k), "kernels.k", "must be 2, 4 or 6");
  require(is_kernel_order(c.kernels.k_prime), "kernels.k_prime", "must be 2, 4 or 6");

  require(c.bandwidths.mode == "mse" || c.bandwidths.mode == "uniform", "bandwidths.mode",
          "must be \"mse\" or \"uniform\"");
  require(c.bandwidths.c1 > 0.0, "bandwidths.c1", "must be positive");
  require(c.bandwidths.c2 > 0.0, "bandwidths.c2", "must be positive");
  require(c.bandwidths.c_prime > 0.0, "bandwidths.c_prime", "must be positive");

  require(c.density.floor > 0.0, "density.floor", "must be positive");
  require(c.density.delta > 0.0, "density.delta", "must be positive");

  require(c.psi.kind == "clip" || c.psi.kind == "identity", "psi.kind", "must be \"clip\" or \"identity\"");
  require(c.psi.kind != "clip" || c.psi.bound > 0.0, "psi.bound", "must be positive");

  require(c.fit.region_hi > c.fit.region_lo, "fit.region", "needs lo < hi");
  require(c.fit.grid_points >= 2, "fit.grid_points", "must be >= 2");

  require(c.weights.hi > c.weights.lo, "weights.support", "needs lo < hi");
  require(c.weights.lo >= c.fit.region_lo && c.weights.hi <= c.fit.region_hi, "weights.support",
          "must lie inside fit.region");
  require(c.weights.smoothness >= c.kernels.k + 1, "weights.smoothness",
          "must be >= kernels.k + 1 so that q_l has k continuous derivatives");
  require(c.weights.nodes >= 1 && c.weights.nodes <= kMaxGaussLegendreNodes, "weights.nodes",
          "must lie in [1, 64]");

  const auto& e = c.experiment;
  require(e.T_ladder.size() >= 3, "experiment.T_ladder", "needs at least 3 rungs");
  for (std::size_t i = 0; i < e.T_ladder.size(); ++i) {
    require(e.T_ladder[i] > 1.0, "experiment.T_ladder", "every horizon must exceed 1");
    require(i == 0 || e.T_ladder[i] > e.T_ladder[i - 1], "experiment.T_ladder", "must be strictly increasing");
  }
  require(e.replicates >= 1, "experiment.replicates", "must be >= 1");
  require(e.sup_grid >= 2, "experiment.sup_grid", "must be >= 2");
  require(e.sup_hi > e.sup_lo, "experiment.sup_region", "needs lo < hi");
  require(e.threads >= 0, "experiment.threads", "must be >= 0");
  for (const auto& p : e.eval_points) {
    require(static_cast<int>(p.size()) == s.d, "experiment.eval_points", "every point needs length simulate.d");
    for (double v : p)
      require(v >= c.fit.region_lo - c.density.delta && v <= c.fit.region_hi + c.density.delta,
              "experiment.eval_points", "points must lie within density.delta of fit.region");
  }
}

} // namespace

RunConfig
parse_config(const json& doc)
{
  if (!doc.is_object())
    throw ConfigError("config: top level must be a JSON object");
  static const std::set<std::string> sections = { "version", "simulate", "kernels", "bandwidths", "density",
                                                  "psi", "weights", "fit", "experiment" };
  for (const auto& item : doc.items())
    if (!sections.contains(item.key()))
      fail(item.key(), "unknown key");

  RunConfig c;
  if (doc.contains("version")) {
    if (!doc.at("version").is_string() || doc.at("version").get<std::string>() != kConfigVersion)
      fail("version", std::string("expected \"") + kConfigVersion + "\"");
  }

  SectionReader sim(doc, "simulate");
  sim.read("d", c.simulate.d);
  sim.read("horizon", c.simulate.horizon);
  sim.read("step", c.simulate.step);
  sim.read("theta", c.simulate.theta);
  sim.read("sigma", c.simulate.sigma);
  sim.read("scale", c.simulate.scale);
  sim.read("x0_law", c.simulate.x0_law);
  sim.read("noise_sigma", c.simulate.noise_sigma);
  sim.read("noise_theta", c.simulate.noise_theta);
  sim.read("seed", c.simulate.seed);
  sim.read("model", c.simulate.model);
  sim.finish();

  SectionReader ker(doc, "kernels");
  ker.read("k", c.kernels.k);
  ker.read("k_prime", c.kernels.k_prime);
  ker.finish();

  SectionReader bw(doc, "bandwidths");
  bw.read("mode", c.bandwidths.mode);
  bw.read("c1", c.bandwidths.c1);
  bw.read("c2", c.bandwidths.c2);
  bw.read("c_prime", c.bandwidths.c_prime);
  bw.finish();

  SectionReader den(doc, "density");
  den.read("floor", c.density.floor);
  den.read("delta", c.density.delta);
  den.finish();

  SectionReader psi(doc, "psi");
  psi.read("kind", c.psi.kind);
  psi.read("bound", c.psi.bound);
  psi.finish();

  SectionReader fit(doc, "fit");
  fit.read("grid_points", c.fit.grid_points);
  fit.read_range("region", c.fit.region_lo, c.fit.region_hi);
  fit.finish();

  SectionReader w(doc, "weights");
  w.read_range("support", c.weights.lo, c.weights.hi);
  c.weights.smoothness = c.kernels.k + 1;
  w.read("smoothness", c.weights.smoothness);
  w.read("nodes", c.weights.nodes);
  w.finish();

  SectionReader exp(doc, "experiment");
  exp.read("T_ladder", c.experiment.T_ladder);
  exp.read("replicates", c.experiment.replicates);
  exp.read("base_seed", c.experiment.base_seed);
  exp.read("sup_grid", c.experiment.sup_grid);
  exp.read_range("sup_region", c.experiment.sup_lo, c.experiment.sup_hi);
  exp.read("eval_points", c.experiment.eval_points);
  exp.read("threads", c.experiment.threads);
  exp.finish();

  validate(c);
  return c;
}

RunConfig
load_config(const std::filesystem::path& path)
{
  std::ifstream file(path);
  if (!file)
    throw ConfigError("config: cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: parse error in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

json
dump_config(const RunConfig& c)
{
  json doc;
  doc["version"] = c.version;
  doc["simulate"] = { { "d", c.simulate.d },
                      { "horizon", c.simulate.horizon },
                      { "step", c.simulate.step },
                      { "theta", c.simulate.theta },
                      { "sigma", c.simulate.sigma },
                      { "scale", c.simulate.scale },
                      { "x0_law", c.simulate.x0_law },
                      { "noise_sigma", c.simulate.noise_sigma },
                      { "noise_theta", c.simulate.noise_theta },
                      { "seed", c.simulate.seed },
                      { "model", c.simulate.model } };
  doc["kernels"] = { { "k", c.kernels.k }, { "k_prime", c.kernels.k_prime } };
  doc["bandwidths"] = { { "mode", c.bandwidths.mode },
                        { "c1", c.bandwidths.c1 },
                        { "c2", c.bandwidths.c2 },
                        { "c_prime", c.bandwidths.c_prime } };
  doc["density"] = { { "floor", c.density.floor }, { "delta", c.density.delta } };
  doc["psi"] = { { "kind", c.psi.kind }, { "bound", c.psi.bound } };
  doc["fit"] = { { "grid_points", c.fit.grid_points },
                 { "region", json::array({ c.fit.region_lo, c.fit.region_hi }) } };
  doc["weights"] = { { "support", json::array({ c.weights.lo, c.weights.hi }) },
                     { "smoothness", c.weights.smoothness },
                     { "nodes", c.weights.nodes } };
  doc["experiment"] = { { "T_ladder", c.experiment.T_ladder },
                        { "replicates", c.experiment.replicates },
                        { "base_seed", c.experiment.base_seed },
                        { "sup_grid", c.experiment.sup_grid },
                        { "sup_region", json::array({ c.experiment.sup_lo, c.experiment.sup_hi }) },
                        { "eval_points", c.experiment.eval_points },
                        { "threads", c.experiment.threads } };
  return doc;
}

BandwidthMode
parse_mode(const std::string& text)
{
  if (text == "mse")
    return BandwidthMode::mse;
  if (text == "uniform")
    return BandwidthMode::uniform;
  throw ConfigError("mode: expected \"mse\" or \"uniform\", got \"" + text + "\"");
}

std::string
to_string(BandwidthMode mode)
{
  return mode == BandwidthMode::mse ? "mse" : "uniform";
}

SimulationSettings
simulation_settings(const RunConfig& c)
{
  SimulationSettings s;
  s.d = c.simulate.d;
  s.horizon = c.simulate.horizon;
  s.step = c.simulate.step;
  s.ou.theta = c.simulate.theta;
  s.ou.sigma = c.simulate.sigma;
  s.ou.x0_law = c.simulate.x0_law == "fixed" ? InitialLaw::fixed_zero : InitialLaw::stationary;
  s.scale = c.simulate.scale;
  s.noise_sigma = c.simulate.noise_sigma;
  s.noise_theta = c.simulate.noise_theta;
  s.model = c.simulate.model;
  s.seed = c.simulate.seed;
  return s;
}

FitConfig
fit_config(const RunConfig& c)
{
  FitConfig f;
  f.k = c.kernels.k;
  f.k_prime = c.kernels.k_prime;
  f.plan = { c.kernels.k, c.bandwidths.c1, c.bandwidths.c2, parse_mode(c.bandwidths.mode) };
  f.c_prime = c.bandwidths.c_prime;
  f.density_floor = c.density.floor;
  f.psi = c.psi.kind == "identity" ? Psi::identity() : Psi::clip(c.psi.bound);
  f.weights = WeightSystem::symmetric(c.simulate.d, c.weights.lo, c.weights.hi, c.weights.smoothness,
                                      c.weights.nodes);
  f.grid_points = c.fit.grid_points;
  f.region_lo = c.fit.region_lo;
  f.region_hi = c.fit.region_hi;
  return f;
}

RateStudyConfig
rate_study_config(const RunConfig& c)
{
  RateStudyConfig r;
  r.simulation = simulation_settings(c);
  r.fit = fit_config(c);
  r.T_ladder = c.experiment.T_ladder;
  r.replicates = c.experiment.replicates;
  r.base_seed = c.experiment.base_seed;
  for (const auto& p : c.experiment.eval_points)
    r.eval_points.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
  r.sup_grid = c.experiment.sup_grid;
  r.sup_lo = c.experiment.sup_lo;
  r.sup_hi = c.experiment.sup_hi;
  r.threads = c.experiment.threads;
  return r;
}

} // namespace margint
