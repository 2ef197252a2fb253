#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergo/cli.hpp"
#include "ergo/measure.hpp"
#include "ergo/schedule.hpp"

using namespace ergo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "ergo_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kOuConfig = R"({
  "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0},
            "noise_amplitude": 1.0},
  "grid": {"rule": "harmonic", "h": 0.5},
  "run": {"particles": 2000, "n_steps": 32, "checkpoints": [0, 16, 32], "seed": 5,
          "initial": {"kind": "gaussian", "mean": [1.0], "stddev": 0.5}},
  "output": {"directory": "OUTDIR"}
})";

std::string with_outdir(std::string text, const fs::path& out) {
  const auto pos = text.find("OUTDIR");
  text.replace(pos, 6, out.string());
  return text;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing validates fields") {
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"run": {}})"), ConfigError);

  // missing seed
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({
        "model": {"family": "langevin", "drift": {"kind": "ou", "rate": 1.0}},
        "run": {"particles": 10, "initial": {"kind": "point", "value": [0]}}
      })"),
      doctest::Contains("seed"), ConfigError);

  // unsorted checkpoints
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({
        "model": {"family": "langevin", "drift": {"kind": "ou", "rate": 1.0}},
        "run": {"particles": 10, "n_steps": 10, "checkpoints": [5, 3], "seed": 1,
                "initial": {"kind": "point", "value": [0]}}
      })"),
      doctest::Contains("sorted"), ConfigError);

  // unknown model family names the field
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({
        "model": {"family": "wibble"},
        "run": {"particles": 10, "seed": 1, "initial": {"kind": "point", "value": [0]}}
      })"),
      doctest::Contains("model.family"), ConfigError);
}

TEST_CASE("checkpoint beyond n_steps exits 2 and names the field") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "bad";
  auto cfg = write_config("bad.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 10, "n_steps": 4, "checkpoints": [8], "seed": 1,
            "initial": {"kind": "point", "value": [0.0]}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  CHECK(cmd_simulate(opts) == kExitConfigError);
}

TEST_CASE("simulate is byte-identical across runs and worker counts") {
  const fs::path base = fs::temp_directory_path() / "ergo_cli_tests";
  auto cfg = write_config("ou.json", with_outdir(kOuConfig, base / "run_a"));

  CliOptions a;
  a.config_path = cfg.string();
  REQUIRE(cmd_simulate(a) == kExitPass);

  CliOptions b = a;
  b.out_dir = (base / "run_b").string();
  b.workers = 4;
  REQUIRE(cmd_simulate(b) == kExitPass);

  for (const char* f :
       {"checkpoints/step_00000000.bin", "checkpoints/step_00000016.bin",
        "checkpoints/step_00000032.bin", "manifest.json"}) {
    CHECK(slurp(base / "run_a" / f) == slurp(base / "run_b" / f));
  }
}

TEST_CASE("simulate with zero steps reproduces the initial law") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "zero";
  auto cfg = write_config("zero.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 50, "n_steps": 0, "checkpoints": [0], "seed": 9,
            "initial": {"kind": "point", "value": [2.5]}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_simulate(opts) == kExitPass);
  auto e = read_checkpoint((out / "checkpoints" / "step_00000000.bin").string());
  REQUIRE(e.size() == 50);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e.point(i)[0] == 2.5);
}

TEST_CASE("wasserstein of a file against itself is zero") {
  const fs::path dir = fs::temp_directory_path() / "ergo_cli_tests";
  fs::create_directories(dir);
  const fs::path f = dir / "self.csv";
  {
    std::ofstream out(f);
    out << "0.5\n1.5\n-0.25\n";
  }
  std::string line;
  REQUIRE(cmd_wasserstein(f.string(), f.string(), 2.0, "exact_1d", &line) == kExitPass);
  CHECK(line == "0");
}

TEST_CASE("sigma table matches the schedule module") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "sigma";
  auto cfg = write_config("sigma.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 1, "n_steps": 0, "seed": 1,
            "initial": {"kind": "point", "value": [0.0]}},
    "pipeline": {"sigma": {"b": 1.0, "eps": 1.0, "n_max": 1000}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_sigma(opts) == kExitPass);

  auto grid = TimeGrid::harmonic(0.5);
  const auto series = sigma_series(grid, {1.0, 1.0}, 1000);
  std::ifstream csv(out / "report.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "n,gamma_n,t_n,sigma,bound_shape,ratio");
  std::size_t n = 0;
  while (std::getline(csv, line)) {
    ++n;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(std::stoul(cell) == n);
    std::getline(row, cell, ',');  // gamma
    std::getline(row, cell, ',');  // t
    std::getline(row, cell, ',');  // sigma
    CHECK(std::stod(cell) == doctest::Approx(series[n]).epsilon(1e-14));
  }
  CHECK(n == 1000);
}

TEST_CASE("couple command recovers 2k for OU within 5%") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "couple";
  auto cfg = write_config("couple.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 3000, "n_steps": 0, "seed": 21,
            "initial": {"kind": "gaussian", "mean": [0.0], "stddev": 1.0}},
    "pipeline": {"couple": {"gammas": [0.0625, 0.03125, 0.015625, 0.0078125,
                                       0.00390625, 0.001953125],
                            "reps": 2, "eps": 1.0, "p": 2.0}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_couple(opts) == kExitPass);
  const std::string verdict = slurp(out / "verdict.json");
  const auto pos = verdict.find("\"b_star\": ");
  REQUIRE(pos != std::string::npos);
  const double b_star = std::stod(verdict.substr(pos + 10));
  CHECK(std::abs(b_star - 2.0) < 0.1);
}

TEST_CASE("flmonitor command reports pass and fail") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "fl";
  auto good = write_config("fl_good.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 5000, "n_steps": 500, "seed": 31,
            "initial": {"kind": "gaussian", "mean": [0.0], "stddev": 1.0}},
    "pipeline": {"flmonitor": {"b_bar": 1.5, "c_bar": 1.0}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = good.string();
  CHECK(cmd_flmonitor(opts) == kExitPass);

  auto bad = write_config("fl_bad.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "affine", "slope": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 5000, "n_steps": 200, "seed": 32,
            "initial": {"kind": "gaussian", "mean": [1.0], "stddev": 0.5}},
    "pipeline": {"flmonitor": {"b_bar": 1.5, "c_bar": 1.0}},
    "output": {"directory": "OUTDIR"}
  })", out / "bad"));
  opts.config_path = bad.string();
  CHECK(cmd_flmonitor(opts) == kExitVerdictFail);
}

TEST_CASE("rate command: no signal above the floor exits 4") {
  // identity model stuck at the initial law, reference = that same law:
  // distances sit at the bias floor and the fit starves
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "starve";
  auto cfg = write_config("starve.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "zero"},
              "noise_amplitude": 0.0},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 4000, "n_steps": 64, "checkpoints": [8, 16, 32, 64], "seed": 41,
            "initial": {"kind": "gaussian", "mean": [0.0], "stddev": 0.7071067811865476}},
    "pipeline": {"rate": {"reference": {"kind": "analytic_gaussian", "mean": 0.0,
                                        "variance": 0.5},
                          "predicted": 1.0, "distance": "moment_gaussian"}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  CHECK(cmd_rate(opts) == kExitBiasStarvation);
}

TEST_CASE("rate command: OU mini pipeline passes") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "rate";
  auto cfg = write_config("rate.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "ou", "rate": 1.0}},
    "grid": {"rule": "harmonic", "h": 0.5},
    "run": {"particles": 20000, "n_steps": 512,
            "checkpoints": [8, 16, 32, 64, 128, 256, 512], "seed": 51,
            "initial": {"kind": "point", "value": [10.0]}},
    "pipeline": {"rate": {"reference": {"kind": "analytic_gaussian", "mean": 0.0,
                                        "variance": 0.5},
                          "predicted": 1.0, "distance": "moment_gaussian"}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  CHECK(cmd_rate(opts) == kExitPass);
  const std::string verdict = slurp(out / "verdict.json");
  CHECK(verdict.find("\"overall\": \"PASS\"") != std::string::npos);
}

TEST_CASE("numeric blow-up exits 3") {
  const fs::path out = fs::temp_directory_path() / "ergo_cli_tests" / "blowup";
  auto cfg = write_config("blowup.json", with_outdir(R"({
    "model": {"family": "langevin", "dim": 1, "drift": {"kind": "affine", "slope": 60.0},
              "noise_amplitude": 0.0},
    "grid": {"rule": "uniform", "gamma": 0.5},
    "run": {"particles": 4, "n_steps": 400, "checkpoints": [400], "seed": 61,
            "initial": {"kind": "point", "value": [1e300]}},
    "output": {"directory": "OUTDIR"}
  })", out));
  CliOptions opts;
  opts.config_path = cfg.string();
  CHECK(cmd_simulate(opts) == kExitBlowup);
}

TEST_SUITE_END();
