#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergo/cli.hpp"
#include "ergo/diagnostics.hpp"
#include "ergo/models/langevin.hpp"

using namespace ergo;
using models::Drift;
using models::LangevinModel;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("integration");

TEST_CASE("OU end-to-end verdict: boundedness, coupling, rate all pass") {
  const double k = 1.0, s = 1.0, h = 0.5;
  LangevinModel model({1, Drift::ou(k), s});
  auto grid = TimeGrid::harmonic(h);

  Ensemble cloud(20000, 1);
  NoiseStream init(70, 0, 0, 0);
  for (auto& v : cloud.data()) v = init.gaussian();

  auto monitor =
      fl_monitor(model, cloud, grid, 1000, 71, {2.0 * k - k * k * h, s * s, h, 2.0, 3.0});
  CHECK(monitor.pass);

  Ensemble shifted = cloud;
  for (auto& v : shifted.data()) v += 1.5;
  std::vector<double> gammas;
  for (int e = 4; e <= 9; ++e) gammas.push_back(std::pow(2.0, -e));
  auto coupling = estimate_coupling(model, model, cloud, shifted, gammas, 2, 72, 1.0, 2.0);
  CHECK(!coupling.degenerate);
  CHECK(coupling.b_star > 0.0);

  Ensemble start(20000, 1);
  for (auto& v : start.data()) v = 8.0;
  std::vector<std::size_t> ns{16, 32, 64, 128, 256, 512, 1024, 2048};
  std::set<std::size_t> checkpoints(ns.begin(), ns.end());
  auto snaps = run_scheme(model, start, grid, 2048, 73, checkpoints);
  const auto ref = ou_invariant(k, s);
  const double floor = bias_floor_gaussian(ref, 20000, 5, 74, true);
  std::vector<double> ws;
  for (auto n : ns) ws.push_back(moment_matched_w2(snaps.at(n), ref));
  auto rate = fit_rate(ns, ws, 2.0, 1.0, floor);
  CHECK(rate.pass);

  auto verdict = theorem_verdict("ou_w2", "k > 0", k, monitor, coupling, rate);
  CHECK(verdict.overall == "PASS");
  REQUIRE(verdict.clauses.size() == 3);
  for (const auto& c : verdict.clauses) CHECK(c.pass);
}

TEST_CASE("log-corrected rate flag propagates into the verdict file") {
  const fs::path out = fs::temp_directory_path() / "ergo_integration" / "logfit";
  fs::create_directories(out.parent_path());
  const fs::path cfg_path = out.parent_path() / "logfit.json";
  std::ostringstream cfg;
  cfg << R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 20000, "n_steps": 512,
            "checkpoints": [8, 16, 32, 64, 128, 256, 512], "seed": 75,
            "initial": {"kind": "point", "value": [10.0]}},
    "pipeline": {"rate": {"reference": {"kind": "analytic_gaussian", "mean": 0.0,
                          "variance": 0.5}, "predicted": 1.0, "log_corrected": true}},
    "output": {"directory": ")" << out.string() << R"("}
  })";
  std::ofstream(cfg_path) << cfg.str();
  CliOptions opts;
  opts.config_path = cfg_path.string();
  REQUIRE(cmd_rate(opts) == kExitPass);
  std::ifstream vf(out / "verdict.json");
  std::stringstream ss;
  ss << vf.rdbuf();
  CHECK(ss.str().find("\"log_corrected\": true") != std::string::npos);
}

TEST_CASE("empirical reference drives the rate pipeline end to end") {
  // reflected dynamics have no closed-form invariant law here; the rate
  // pipeline builds its reference from a long constant-step run
  const fs::path out = fs::temp_directory_path() / "ergo_integration" / "refl";
  fs::create_directories(out.parent_path());
  const fs::path cfg_path = out.parent_path() / "refl.json";
  std::ostringstream cfg;
  cfg << R"({
    "model": {"family": "reflected", "drift": {"a0": 1.0, "a1": -2.0},
              "sigma": {"a0": 0.4, "a1": 0.0}, "flavor": "exact_skorokhod"},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 4000, "n_steps": 256, "checkpoints": [8, 16, 32, 64, 128, 256],
            "seed": 76, "initial": {"kind": "point", "value": [3.0]}},
    "pipeline": {"rate": {"reference": {"kind": "empirical", "gamma": 0.002,
                          "burn_in": 2000, "n_collect": 2000},
                          "predicted": 1.0, "distance": "exact_1d"}},
    "output": {"directory": ")" << out.string() << R"("}
  })";
  std::ofstream(cfg_path) << cfg.str();
  CliOptions opts;
  opts.config_path = cfg_path.string();
  CHECK(cmd_rate(opts) == kExitPass);
  std::ifstream vf(out / "verdict.json");
  REQUIRE(vf.good());
  std::stringstream ss;
  ss << vf.rdbuf();
  CHECK(ss.str().find("\"slope\":") != std::string::npos);
  CHECK(ss.str().find("\"overall\": \"PASS\"") != std::string::npos);
}

TEST_CASE("kinetic model through the rate pipeline with sliced distances") {
  const fs::path out = fs::temp_directory_path() / "ergo_integration" / "kinetic";
  fs::create_directories(out.parent_path());
  const fs::path cfg_path = out.parent_path() / "kinetic.json";
  std::ostringstream cfg;
  cfg << R"({
    "model": {"family": "kinetic_mv", "dim": 1, "u": 1.0, "gamma_damp": 1.5,
              "kappa": 2.0},
    "grid": {"rule": "harmonic", "h": 0.4},
    "run": {"particles": 3000, "n_steps": 256, "checkpoints": [16, 32, 64, 128, 256],
            "seed": 83, "initial": {"kind": "point", "value": [4.0, 0.0]}},
    "pipeline": {"rate": {"reference": {"kind": "empirical", "gamma": 0.01,
                          "burn_in": 1500, "n_collect": 1000},
                          "predicted": 0.5, "distance": "sliced"}},
    "output": {"directory": ")" << out.string() << R"("}
  })";
  std::ofstream(cfg_path) << cfg.str();
  CliOptions opts;
  opts.config_path = cfg_path.string();
  CHECK(cmd_rate(opts) == kExitPass);
  std::ifstream vf(out / "verdict.json");
  REQUIRE(vf.good());
  std::stringstream ss;
  ss << vf.rdbuf();
  CHECK(ss.str().find("\"overall\": \"PASS\"") != std::string::npos);
}

TEST_SUITE_END();
