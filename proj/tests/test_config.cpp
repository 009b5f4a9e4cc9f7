#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "margint/config.hpp"
#include "margint/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace margint;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path
scratch_dir()
{
  const fs::path dir = fs::temp_directory_path() / "margint_test_config";
  fs::create_directories(dir);
  return dir;
}

fs::path
write_text(const std::string& name, const std::string& text)
{
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string
read_text(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string
config_error(const json& doc)
{
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int
run_cli(const std::string& args)
{
  const std::string cmd = std::string("\"") + MARGINT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("format_real canonical form")
{
  CHECK(format_real(0.25) == "2.5e-1");
  CHECK(format_real(1.0) == "1e0");
  CHECK(format_real(0.0) == "0e0");
  CHECK(format_real(-0.0) == "0e0"); // zero has one spelling
  CHECK(format_real(1234.5) == "1.2345e3");
  CHECK(format_real(1e-300) == "1e-300");
  CHECK(format_real(0.1) == "1.0000000000000001e-1");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv tables")
{
  CsvTable t{ { { "n", ColumnType::integer }, { "x", ColumnType::real }, { "s", ColumnType::text } }, {} };
  CHECK(to_csv(t) == "n,x,s\n");
  t.rows.push_back({ std::int64_t{ 3 }, 0.25, std::string("a") });
  CHECK(to_csv(t) == "n,x,s\n3,2.5e-1,a\n");
  const auto p1 = scratch_dir() / "a.csv";
  const auto p2 = scratch_dir() / "b.csv";
  write_csv(t, p1);
  write_csv(t, p2);
  CHECK(read_text(p1) == read_text(p2));
  CHECK(read_text(p1) == to_csv(t));

  t.rows.push_back({ 0.5, 0.5, std::string("b") });
  CHECK_THROWS_AS(to_csv(t), std::invalid_argument);
  t.rows.back() = { std::int64_t{ 1 }, 0.5 };
  CHECK_THROWS_AS(to_csv(t), std::invalid_argument);
  t.rows.pop_back();
  CHECK_THROWS_AS(write_csv(t, scratch_dir() / "missing" / "x.csv"), std::runtime_error);
}

TEST_CASE("empty config gives the defaults")
{
  const auto c = load_config(write_text("empty.json", "{}"));
  CHECK(c == RunConfig{});
  CHECK(c.simulate.d == 2);
  CHECK(c.kernels.k == 2);
  CHECK(c.kernels.k_prime == 6);
  CHECK(c.weights.smoothness == 3);
  CHECK(c.experiment.replicates == 50);
}

TEST_CASE("smoothness defaults to k + 1")
{
  const auto c = parse_config(json{ { "kernels", { { "k", 4 } } } });
  CHECK(c.weights.smoothness == 5);
}

TEST_CASE("validation names the offending key")
{
  CHECK(config_error(json::parse(R"({"experiment": {"replicates": 0}})")).find("replicates") != std::string::npos);
  CHECK(config_error(json::parse(R"({"simulate": {"bogus": 1}})")).find("simulate.bogus") != std::string::npos);
  CHECK(config_error(json::parse(R"({"surprise": {}})")).find("surprise") != std::string::npos);
  CHECK(config_error(json::parse(R"({"simulate": {"d": 2.5}})")).find("simulate.d") != std::string::npos);
  CHECK(config_error(json::parse(R"({"simulate": {"step": "x"}})")).find("simulate.step") != std::string::npos);
  CHECK(config_error(json::parse(R"({"kernels": {"k": 3}})")).find("kernels.k") != std::string::npos);
  CHECK(config_error(json::parse(R"({"bandwidths": {"mode": "fast"}})")).find("bandwidths.mode") != std::string::npos);
  CHECK(config_error(json::parse(R"({"experiment": {"T_ladder": [10, 5, 20]}})")).find("T_ladder") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"experiment": {"eval_points": [[0, 0, 0]]}})")).find("eval_points") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"experiment": {"eval_points": [[3, 0]]}})")).find("eval_points") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"weights": {"support": [-1.5, 0.5]}})")).find("weights.support") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"weights": {"smoothness": 2}})")).find("weights.smoothness") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"simulate": {"model": "nope"}})")).find("simulate.model") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"version": "other"})")).find("version") != std::string::npos);
  CHECK(config_error(json::parse(R"([1, 2])")).find("top level") != std::string::npos);
  CHECK_THROWS_AS(load_config(write_text("broken.json", "{ nope")), ConfigError);
  CHECK_THROWS_AS(load_config(scratch_dir() / "absent.json"), ConfigError);
}

TEST_CASE("load, dump, load round trip")
{
  const auto path = write_text("rt.json", R"({
    "simulate": {"d": 3, "horizon": 12.5, "seed": 9, "x0_law": "fixed", "model": "linear"},
    "kernels": {"k": 4},
    "bandwidths": {"mode": "uniform", "c1": 0.7},
    "psi": {"kind": "identity"},
    "weights": {"support": [-0.5, 0.8], "nodes": 8},
    "experiment": {"T_ladder": [10, 20, 40, 80], "eval_points": [[0, 0.1, -0.2]], "threads": 2}
  })");
  const auto first = load_config(path);
  const auto dumped = dump_config(first);
  const auto second = load_config(write_text("rt2.json", dumped.dump(2)));
  CHECK(first == second);
  CHECK(dump_config(second) == dumped);
  CHECK(second.simulate.d == 3);
  CHECK(second.weights.smoothness == 5);
}

TEST_CASE("config converters")
{
  const auto c = parse_config(json::parse(R"({"simulate": {"d": 3, "x0_law": "fixed"},
      "bandwidths": {"mode": "uniform"}, "psi": {"kind": "clip", "bound": 7}})"));
  const auto s = simulation_settings(c);
  CHECK(s.d == 3);
  CHECK(s.ou.x0_law == InitialLaw::fixed_zero);
  const auto f = fit_config(c);
  CHECK(f.weights.dim() == 3);
  CHECK(f.plan.mode == BandwidthMode::uniform);
  CHECK(f.psi(100.0) == 7.0);
  const auto r = rate_study_config(c);
  CHECK(r.mode() == BandwidthMode::uniform);
  CHECK(r.T_ladder.size() == 5);
  CHECK_NOTHROW(validate(r));
}

TEST_CASE("cli exit codes")
{
  const auto good = write_text("cli_good.json", R"({"simulate": {"horizon": 20}})");
  const auto bad = write_text("cli_bad.json", R"({"experiment": {"replicates": 0}})");
  const auto out = (scratch_dir() / "cli_out.csv").string();
  CHECK(run_cli("kernels verify --order 4") == 0);
  CHECK(run_cli("kernels verify --order 3") == 2);
  CHECK(run_cli("simulate --config " + good.string() + " --out " + out) == 0);
  CHECK(read_text(out).rfind("t,x_1,x_2,y\n", 0) == 0);
  CHECK(run_cli("simulate --config " + bad.string() + " --out " + out) == 2);
  CHECK(run_cli("simulate --out " + out) == 2);
  CHECK(run_cli("rates --mode sideways --config " + good.string() + " --out " + out) == 2);
  CHECK(run_cli("simulate --config " + good.string() + " --out " + (scratch_dir() / "no" / "x.csv").string()) == 1);
  CHECK(run_cli("fit --config " + good.string() + " --grid 5 --out " + out) == 0);
  CHECK(run_cli("fit-additive --config " + good.string() + " --out-components " + out + " --out-eval " +
                (scratch_dir() / "eval.csv").string()) == 0);
  CHECK(read_text(out).rfind("l,x,eta_hat,eta_true\n", 0) == 0);
}
