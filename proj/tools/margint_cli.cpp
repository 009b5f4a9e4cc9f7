//! margint command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or usage error,
//! 3 numerical failure.

#include "margint/config.hpp"
#include "margint/csv.hpp"
#include "margint/experiment.hpp"
#include "margint/integration.hpp"
#include "margint/kernel.hpp"
#include "margint/presets.hpp"
#include "margint/regression.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace margint;
namespace fs = std::filesystem;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void
write_json(const nlohmann::json& doc, const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

void
write_table(const CsvTable& table, const fs::path& path)
{
  try {
    write_csv(table, path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

fs::path
default_summary_path(const fs::path& out)
{
  fs::path p = out;
  p.replace_extension();
  return p.string() + ".summary.json";
}

std::vector<Column>
coordinate_columns(int d)
{
  std::vector<Column> cols;
  for (int l = 1; l <= d; ++l)
    cols.push_back({ "x_" + std::to_string(l), ColumnType::real });
  return cols;
}

//! Calls visit(x) for every point of the tensor grid lo..hi with n points per
//! axis, last axis fastest.
template <typename Visit>
void
for_each_grid_point(int d, double lo, double hi, int n, Visit&& visit)
{
  const Eigen::VectorXd axis = uniform_grid(lo, hi, n);
  std::vector<int> index(d, 0);
  Eigen::VectorXd x(d);
  while (true) {
    for (int l = 0; l < d; ++l)
      x(l) = axis(index[l]);
    visit(x);
    int l = d - 1;
    while (l >= 0 && ++index[l] == n)
      index[l--] = 0;
    if (l < 0)
      break;
  }
}

SampledPath
simulate_from(const RunConfig& config)
{
  const auto settings = simulation_settings(config);
  return simulate_path(settings, make_model(settings.model, settings.d), settings.seed);
}

// ---------------------------------------------------------------------------

int
run_kernels_verify(int order, int nodes)
{
  const auto kernel = make_kernel(order);
  CsvTable table{ { { "j", ColumnType::integer }, { "value", ColumnType::real } }, {} };
  bool ok = true;
  for (int j = 0; j <= order; ++j) {
    const double m = kernel_moment(kernel, j, nodes);
    if (j == 0)
      ok = ok && std::abs(m - 1.0) <= 1e-10;
    else if (j < order)
      ok = ok && std::abs(m) <= 1e-8;
    table.rows.push_back({ std::int64_t{ j }, m });
  }
  std::cout << to_csv(table);
  if (!ok) {
    std::cerr << "kernels verify: order " << order << " moment conditions violated\n";
    return kExitNumerical;
  }
  return 0;
}

int
run_simulate(const fs::path& config_path, const fs::path& out)
{
  const auto config = load_config(config_path);
  const auto path = simulate_from(config);
  CsvTable table;
  table.schema.push_back({ "t", ColumnType::real });
  for (auto& c : coordinate_columns(path.dim()))
    table.schema.push_back(c);
  table.schema.push_back({ "y", ColumnType::real });
  for (Eigen::Index i = 0; i < path.size(); ++i) {
    std::vector<Cell> row{ path.time(i) };
    for (int l = 0; l < path.dim(); ++l)
      row.emplace_back(path.covariates()(i, l));
    row.emplace_back(path.responses()(i));
    table.rows.push_back(std::move(row));
  }
  write_table(table, out);
  return 0;
}

int
run_fit(const fs::path& config_path, int grid, const fs::path& out)
{
  if (grid < 2)
    throw ConfigError("--grid: must be >= 2");
  const auto config = load_config(config_path);
  const auto path = simulate_from(config);
  const AdditiveEstimator estimator(path, fit_config(config));
  const auto& full = estimator.regression();

  CsvTable table;
  table.schema = coordinate_columns(path.dim());
  table.schema.push_back({ "m_tilde", ColumnType::real });
  for_each_grid_point(path.dim(), config.fit.region_lo, config.fit.region_hi, grid, [&](const Eigen::VectorXd& x) {
    std::vector<Cell> row;
    for (Eigen::Index l = 0; l < x.size(); ++l)
      row.emplace_back(x(l));
    const double value = full.full(x);
    if (!std::isfinite(value))
      throw NumericalFailure("fit: non-finite estimate");
    row.emplace_back(value);
    table.rows.push_back(std::move(row));
  });
  write_table(table, out);
  return 0;
}

int
run_fit_additive(const fs::path& config_path, const fs::path& out_components, const fs::path& out_eval,
                 int eval_grid)
{
  if (eval_grid < 2)
    throw ConfigError("--eval-grid: must be >= 2");
  const auto config = load_config(config_path);
  const auto fit = fit_config(config);
  const auto settings = simulation_settings(config);
  const auto spec = make_model(settings.model, settings.d);
  const auto path = simulate_path(settings, spec, settings.seed);
  const auto table = fit_additive(path, fit);

  CsvTable comp{ { { "l", ColumnType::integer },
                   { "x", ColumnType::real },
                   { "eta_hat", ColumnType::real },
                   { "eta_true", ColumnType::real } },
                 {} };
  for (int l = 0; l < table.dim(); ++l)
    for (Eigen::Index g = 0; g < table.grid.size(); ++g) {
      const double x = table.grid(g);
      if (!std::isfinite(table.eta(g, l)))
        throw NumericalFailure("fit-additive: non-finite component at l=" + std::to_string(l + 1));
      comp.rows.push_back({ std::int64_t{ l + 1 }, x, table.eta(g, l), true_eta(spec, fit.weights, l, x) });
    }
  write_table(comp, out_components);

  CsvTable eval;
  eval.schema = coordinate_columns(settings.d);
  eval.schema.push_back({ "m_hat", ColumnType::real });
  eval.schema.push_back({ "m_true", ColumnType::real });
  for_each_grid_point(settings.d, config.fit.region_lo, config.fit.region_hi, eval_grid,
                      [&](const Eigen::VectorXd& x) {
                        std::vector<Cell> row;
                        for (Eigen::Index l = 0; l < x.size(); ++l)
                          row.emplace_back(x(l));
                        row.emplace_back(table.evaluate(x));
                        row.emplace_back(true_regression(spec, x));
                        eval.rows.push_back(std::move(row));
                      });
  write_table(eval, out_eval);
  return 0;
}

void
throw_if_failed(const RateTable& table, const std::string& what)
{
  for (const auto& row : table.rows)
    if (!row.failure.empty())
      throw NumericalFailure(what + ": " + row.failure);
}

nlohmann::json
slope_json(const SlopeFit& fit)
{
  return { { "slope", fit.slope },
           { "intercept", fit.intercept },
           { "slope_se", fit.slope_se },
           { "ols_se", fit.ols_se },
           { "sampling_se", fit.sampling_se } };
}

int
run_rates(const std::string& mode_text, const fs::path& config_path, const fs::path& out,
          const std::optional<fs::path>& summary)
{
  const auto mode = parse_mode(mode_text);
  auto config = load_config(config_path);
  config.bandwidths.mode = to_string(mode);
  const auto study = rate_study_config(config);
  const auto table = run_rate_study(study);
  throw_if_failed(table, "rates");

  CsvTable csv{ { { "T", ColumnType::real },
                  { "error", ColumnType::real },
                  { "spread", ColumnType::real },
                  { "clamp_rate", ColumnType::real },
                  { "clamp_count", ColumnType::integer },
                  { "density_evaluations", ColumnType::integer } },
                {} };
  std::uint64_t evaluations = 0, clamped = 0;
  for (const auto& row : table.rows) {
    csv.rows.push_back({ row.horizon, row.error, row.spread, row.clamp_rate,
                         static_cast<std::int64_t>(row.density_clamped),
                         static_cast<std::int64_t>(row.density_evaluations) });
    evaluations += row.density_evaluations;
    clamped += row.density_clamped;
  }
  write_table(csv, out);

  const auto fit = rate_slope(table, mode);
  auto doc = slope_json(fit);
  doc["mode"] = to_string(mode);
  doc["theoretical_slope"] = theoretical_slope(mode, config.kernels.k);
  doc["k"] = config.kernels.k;
  doc["d"] = config.simulate.d;
  doc["replicates"] = config.experiment.replicates;
  doc["base_seed"] = config.experiment.base_seed;
  doc["T_ladder"] = config.experiment.T_ladder;
  doc["density_evaluations"] = evaluations;
  doc["clamp_count"] = clamped;
  write_json(doc, summary.value_or(default_summary_path(out)));
  return 0;
}

int
run_compare(const fs::path& config_path, const fs::path& out, const std::optional<fs::path>& summary)
{
  auto config = load_config(config_path);
  config.bandwidths.mode = "mse";
  const auto study = rate_study_config(config);
  const auto cmp = compare_full_vs_additive(study);
  throw_if_failed(cmp.additive, "compare (additive)");
  throw_if_failed(cmp.full, "compare (full)");

  CsvTable csv{ { { "T", ColumnType::real },
                  { "error_additive", ColumnType::real },
                  { "spread_additive", ColumnType::real },
                  { "error_full", ColumnType::real },
                  { "spread_full", ColumnType::real },
                  { "clamp_rate", ColumnType::real },
                  { "clamp_count", ColumnType::integer } },
                {} };
  for (std::size_t r = 0; r < cmp.additive.rows.size(); ++r) {
    const auto& a = cmp.additive.rows[r];
    const auto& f = cmp.full.rows[r];
    csv.rows.push_back({ a.horizon, a.error, a.spread, f.error, f.spread, a.clamp_rate,
                         static_cast<std::int64_t>(a.density_clamped) });
  }
  write_table(csv, out);

  const int k = config.kernels.k;
  const int d = config.simulate.d;
  nlohmann::json doc{ { "additive", slope_json(cmp.slope_additive) },
                      { "full", slope_json(cmp.slope_full) },
                      { "slope_additive", cmp.slope_additive.slope },
                      { "slope_full", cmp.slope_full.slope },
                      { "slope_gap", cmp.slope_additive.slope - cmp.slope_full.slope },
                      { "theoretical_slope_additive", theoretical_slope(BandwidthMode::mse, k) },
                      { "theoretical_slope_full", -2.0 * k / (2.0 * k + d) },
                      { "k", k },
                      { "d", d },
                      { "replicates", config.experiment.replicates },
                      { "base_seed", config.experiment.base_seed },
                      { "T_ladder", config.experiment.T_ladder } };
  write_json(doc, summary.value_or(default_summary_path(out)));
  return 0;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Marginal-integration additive regression for continuous-time processes" };
  app.require_subcommand(1);

  auto* kernels = app.add_subcommand("kernels", "Kernel utilities");
  kernels->require_subcommand(1);
  auto* verify = kernels->add_subcommand("verify", "Print the moment table of a kernel as CSV");
  int order = 2;
  int nodes = 32;
  verify->add_option("--order", order, "Kernel order (2, 4 or 6)")->required();
  verify->add_option("--nodes", nodes, "Gauss-Legendre nodes")->capture_default_str();

  std::string config_file;
  std::string out_file;

  auto* simulate = app.add_subcommand("simulate", "Simulate a covariate/response path");
  simulate->add_option("--config", config_file, "JSON config")->required();
  simulate->add_option("--out", out_file, "Output CSV")->required();

  auto* fit = app.add_subcommand("fit", "Evaluate the full estimator on a tensor grid");
  int grid = 21;
  fit->add_option("--config", config_file, "JSON config")->required();
  fit->add_option("--grid", grid, "Grid points per axis")->required();
  fit->add_option("--out", out_file, "Output CSV")->required();

  auto* additive = app.add_subcommand("fit-additive", "Fit the additive components");
  std::string out_components, out_eval;
  int eval_grid = 21;
  additive->add_option("--config", config_file, "JSON config")->required();
  additive->add_option("--out-components", out_components, "Component CSV")->required();
  additive->add_option("--out-eval", out_eval, "Evaluation CSV")->required();
  additive->add_option("--eval-grid", eval_grid, "Evaluation grid points per axis")->capture_default_str();

  auto* rates = app.add_subcommand("rates", "Monte-Carlo convergence-rate study");
  std::string mode = "mse";
  std::string summary_file;
  rates->add_option("--mode", mode, "mse or uniform")->required()->check(CLI::IsMember({ "mse", "uniform" }));
  rates->add_option("--config", config_file, "JSON config")->required();
  rates->add_option("--out", out_file, "Output CSV")->required();
  rates->add_option("--summary", summary_file, "Summary JSON (default <out>.summary.json)");

  auto* compare = app.add_subcommand("compare", "Full vs additive estimator rate comparison");
  compare->add_option("--config", config_file, "JSON config")->required();
  compare->add_option("--out", out_file, "Output CSV")->required();
  compare->add_option("--summary", summary_file, "Summary JSON (default <out>.summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const auto summary = summary_file.empty() ? std::nullopt : std::optional<fs::path>(summary_file);
  try {
    if (verify->parsed())
      return run_kernels_verify(order, nodes);
    if (simulate->parsed())
      return run_simulate(config_file, out_file);
    if (fit->parsed())
      return run_fit(config_file, grid, out_file);
    if (additive->parsed())
      return run_fit_additive(config_file, out_components, out_eval, eval_grid);
    if (rates->parsed())
      return run_rates(mode, config_file, out_file, summary);
    if (compare->parsed())
      return run_compare(config_file, out_file, summary);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
