#pragma once

#include <string>

#include "ergo/config.hpp"

namespace ergo {

// Stable exit-code contract shared by all subcommands.
enum ExitCode {
  kExitPass = 0,
  kExitVerdictFail = 1,
  kExitConfigError = 2,
  kExitBlowup = 3,
  kExitBiasStarvation = 4,
};

struct CliOptions {
  std::string config_path;
  std::string out_dir;       // overrides config when nonempty
  int workers = 1;
  uint64_t seed = 0;
  bool seed_override = false;
};

int cmd_simulate(const CliOptions& opts);
int cmd_rate(const CliOptions& opts);
int cmd_couple(const CliOptions& opts);
int cmd_sigma(const CliOptions& opts);
int cmd_flmonitor(const CliOptions& opts);
int cmd_wasserstein(const std::string& file_a, const std::string& file_b, double p,
                    const std::string& method, std::string* result_line);

}  // namespace ergo
