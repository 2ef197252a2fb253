#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ergo/diagnostics.hpp"
#include "ergo/model.hpp"
#include "ergo/schedule.hpp"

namespace ergo {

// Raised on malformed configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InitialLaw {
  enum class Kind { kPoint, kGaussian, kUniformBox, kFile };
  Kind kind = Kind::kPoint;
  std::vector<double> value;  // point location / gaussian mean
  double spread = 1.0;        // gaussian stddev or box half-width
  std::string path;

  Ensemble build(int dim, std::size_t n, uint64_t seed, Constraint constraint) const;
};

struct GridSection {
  GridRule rule = GridRule::kHarmonic;
  double h = 0.5;      // cap (harmonic) or constant step (uniform)
  double t0 = 0.0;
  TimeGrid build() const;
};

struct RunSection {
  std::size_t particles = 1000;
  std::size_t n_steps = 100;
  std::vector<std::size_t> checkpoints;
  uint64_t seed = 0;
  bool seed_set = false;
  InitialLaw initial;
};

struct RatePipeline {
  ReferenceMeasure reference;           // analytic kind parsed directly
  bool reference_is_empirical = false;  // empirical recipe resolved at run time
  double empirical_gamma = 1e-3;
  std::size_t empirical_burn_in = 1000;
  std::size_t empirical_collect = 1000;
  double p = 2.0;
  double predicted = 1.0;
  bool log_corrected = false;           // the b* = eps case
  std::string distance = "moment_gaussian";  // or exact_1d | assignment | sliced
  int bias_seeds = 5;
};

struct CouplePipeline {
  std::vector<double> gammas;
  int reps = 4;
  double eps_assumed = 1.0;
  double p = 2.0;
  int substeps1 = 1;
  int substeps2 = 1;
};

struct SigmaPipeline {
  double b = 1.0;
  double eps = 1.0;
  std::size_t n_max = 1000;
  double lambda = 0.0;
};

struct FlPipeline {
  FLParams params{1.0, 1.0, 0.5, 2.0, 3.0};
};

struct ExperimentConfig {
  std::string raw;  // canonical serialized copy for the manifest
  std::unique_ptr<OneStepModel> model;
  std::unique_ptr<OneStepModel> model2;  // second margin for couple runs
  GridSection grid;
  RunSection run;
  std::optional<RatePipeline> rate;
  std::optional<CouplePipeline> couple;
  std::optional<SigmaPipeline> sigma;
  std::optional<FlPipeline> fl;
  std::string out_dir = "out";
  std::string theorem_id;      // optional verdict label
  std::string regime_condition;
  double regime_margin = 0.0;
  bool has_regime = false;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Model factory shared by the config parser and tests.
std::unique_ptr<OneStepModel> build_model(const std::string& json_text);

uint64_t fnv1a_hash(const std::string& text);

}  // namespace ergo
