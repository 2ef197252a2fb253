#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergo/cli.hpp"
#include "ergo/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ergo: invariant-measure approximation experiments"};
  app.set_version_flag("--version", std::string("ergo ") + ergo::kVersion);
  app.require_subcommand(1);

  ergo::CliOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "experiment configuration file")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--workers", opts.workers, "worker threads (must not affect results)");
    sub->add_option("--seed", opts.seed, "seed override")
        ->each([&](const std::string&) { opts.seed_override = true; });
  };

  auto* simulate = app.add_subcommand("simulate", "run the scheme and write checkpoints");
  add_common(simulate);
  auto* rate = app.add_subcommand("rate", "convergence-rate pipeline against a reference");
  add_common(rate);
  auto* couple = app.add_subcommand("couple", "estimate one-step coupling constants");
  add_common(couple);
  auto* sigma = app.add_subcommand("sigma", "sigma_{b,eps} table and bound check");
  add_common(sigma);
  auto* flmon = app.add_subcommand("flmonitor", "Foster-Lyapunov moment monitor");
  add_common(flmon);

  auto* wass = app.add_subcommand("wasserstein", "distance between two ensemble files");
  std::string file_a, file_b, method = "exact_1d";
  double p = 2.0;
  wass->add_option("fileA", file_a)->required();
  wass->add_option("fileB", file_b)->required();
  wass->add_option("--p", p, "Wasserstein exponent");
  wass->add_option("--method", method, "exact_1d | assignment | sliced");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return ergo::cmd_simulate(opts);
  if (rate->parsed()) return ergo::cmd_rate(opts);
  if (couple->parsed()) return ergo::cmd_couple(opts);
  if (sigma->parsed()) return ergo::cmd_sigma(opts);
  if (flmon->parsed()) return ergo::cmd_flmonitor(opts);
  if (wass->parsed()) {
    std::string line;
    const int rc = ergo::cmd_wasserstein(file_a, file_b, p, method, &line);
    if (rc == ergo::kExitPass) std::cout << line << "\n";
    return rc;
  }
  return ergo::kExitConfigError;
}
