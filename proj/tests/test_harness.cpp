#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vpx/harness.hpp"
#include "vpx/presets.hpp"

using namespace vpx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A configuration small enough to run in seconds but exercising every
// experiment, both gate kinds, and the cached-coefficient plumbing.
RunConfig tiny_config() {
  RunConfig cfg;
  cfg.specs = {preset("freud-hermite")};
  cfg.n_lebesgue = {2, 4};
  cfg.n_kernel = {2, 4, 8};
  cfg.n_approx = {4, 8};
  cfg.p_ratio = {2.0};
  cfg.p_approx = {2.0, kInf};
  cfg.bernstein_polys = 3;
  return cfg;
}

}  // namespace

TEST_CASE("fitted slope recovers exact power laws", "[harness]") {
  const std::vector<double> ns = {2, 4, 8, 16, 32};
  for (double s : {0.5, 0.0, -0.75}) {
    std::vector<double> vals;
    for (double n : ns) vals.push_back(3.0 * std::pow(n, s));
    CHECK(fitted_log_slope(ns, vals) == Catch::Approx(s).margin(1e-12));
  }
}

TEST_CASE("fitted slope uses the top half and skips dead values",
          "[harness]") {
  // Early transient, clean tail: only n >= 8 should enter the fit.
  const std::vector<double> ns = {2, 4, 8, 16, 32, 64};
  std::vector<double> vals = {100.0, 0.001, 2.0, 2.0, 2.0, 2.0};
  CHECK(fitted_log_slope(ns, vals) == Catch::Approx(0.0).margin(1e-12));

  // Non-positive values cannot enter a log fit; with fewer than two usable
  // points the slope degrades to 0 rather than NaN.
  CHECK(fitted_log_slope({2, 4, 8, 16}, {1.0, 1.0, 0.0, 5.0}) == 0.0);
  CHECK(std::isfinite(fitted_log_slope({2, 4}, {0.0, 0.0})));
}

TEST_CASE("run config JSON round trip", "[harness]") {
  RunConfig cfg = default_run_config();
  cfg.seed = 99;
  cfg.thresholds.slope = 0.07;
  cfg.p_approx = {1.5, kInf};
  const json j = run_config_to_json(cfg);

  // Infinity cannot live in JSON; it travels as the string "inf".
  CHECK(j.at("p_approx").at(1).get<std::string>() == "inf");

  const RunConfig back = run_config_from_json(j);
  CHECK(back.specs.size() == cfg.specs.size());
  CHECK(back.n_lebesgue == cfg.n_lebesgue);
  CHECK(back.n_kernel == cfg.n_kernel);
  CHECK(back.n_approx == cfg.n_approx);
  CHECK(back.p_ratio == cfg.p_ratio);
  CHECK(back.p_approx == cfg.p_approx);
  CHECK(back.seed == 99);
  CHECK(back.thresholds.slope == 0.07);
  CHECK(back.experiments == cfg.experiments);
}

TEST_CASE("run config accepts preset names in JSON", "[harness]") {
  json j;
  j["presets"] = {"erdos-1"};
  const RunConfig cfg = run_config_from_json(j);
  REQUIRE(cfg.specs.size() == 1);
  CHECK(cfg.specs[0].family == WeightFamily::Erdos);
}

TEST_CASE("run config validation rejects bad inputs", "[harness]") {
  auto base = tiny_config();

  auto cfg = base;
  cfg.specs.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.n_approx.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.n_kernel = {4, 0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.p_ratio = {kInf};  // the sup-norm ratio has its own operator-norm path
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.p_approx = {0.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.bernstein_polys = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.experiments = {"vp_uniform_bound", "nope"};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base;
  cfg.experiments.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("derived table sizes honor the reference-tail margin", "[harness]") {
  const RunConfig cfg = default_run_config();
  // Largest approximation index is 64; references need expansions to 4n.
  CHECK(cfg.table_degree() == 256);
  CHECK(cfg.coeff_K() == 256);

  RunConfig floored = cfg;
  floored.degree_floor = 512;
  CHECK(floored.table_degree() == 512);
}

TEST_CASE("small run passes gates and writes deterministic outputs",
          "[harness][integration]") {
  const RunConfig cfg = tiny_config();
  const fs::path root = fs::temp_directory_path() / "vpx_harness_test";
  fs::remove_all(root);
  const fs::path dir_a = root / "a";
  const fs::path dir_b = root / "b";

  const RunOutcome a = run_all(cfg, dir_a.string());

  REQUIRE(a.presets.size() == 1);
  CHECK(a.presets[0].label == "freud-hermite");
  REQUIRE(a.presets[0].reports.size() == experiment_ids().size());
  CHECK(a.pass);
  for (const auto& rep : a.presets[0].reports) {
    INFO(rep.id);
    CHECK(rep.pass);
    CHECK_FALSE(rep.cells.empty());
    CHECK_FALSE(rep.series.empty());
    CHECK(fs::exists(dir_a / "freud-hermite" / (rep.id + ".csv")));
  }
  CHECK(fs::exists(dir_a / "summary.json"));

  // The summary must parse and agree with the in-memory outcome.
  const json summary = json::parse(slurp(dir_a / "summary.json"));
  CHECK(summary.at("overall_pass").get<bool>() == a.pass);
  CHECK(summary.at("presets").size() == 1);

  // Same config, fresh run: every CSV byte-identical (fixed seed, fixed
  // discretization, no wall-clock contamination in the data files).
  const RunOutcome b = run_all(cfg, dir_b.string());
  CHECK(b.pass == a.pass);
  for (const auto& id : experiment_ids()) {
    const fs::path rel = fs::path("freud-hermite") / (id + ".csv");
    INFO(rel.string());
    CHECK(slurp(dir_a / rel) == slurp(dir_b / rel));
  }

  fs::remove_all(root);
}

TEST_CASE("plots data emitted only on request", "[harness][integration]") {
  RunConfig cfg = tiny_config();
  cfg.experiments = {"kernel_diag"};
  cfg.emit_plots_data = true;
  const fs::path root = fs::temp_directory_path() / "vpx_harness_plots";
  fs::remove_all(root);

  run_all(cfg, root.string());
  const fs::path plots = root / "freud-hermite" / "plots_kernel_diag.csv";
  REQUIRE(fs::exists(plots));
  const std::string text = slurp(plots);
  CHECK(text.rfind("series,n,value", 0) == 0);

  fs::remove_all(root);
}
