#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergo/engine.hpp"

namespace ergo {

// Reference invariant measure: a per-coordinate Gaussian with known
// moments, or an empirical ensemble produced by a long constant-step run.
struct ReferenceMeasure {
  enum class Kind { kAnalyticGaussian, kEmpirical };
  Kind kind = Kind::kAnalyticGaussian;
  double mean = 0.0;       // analytic: per coordinate; empirical: probe stat
  double variance = 1.0;   // (the probe is the radial distance when dim > 1)
  Ensemble sample;         // empirical kind
  // Provenance for the empirical kind.
  uint64_t seed = 0;
  double step = 0.0;
  std::size_t burn_in = 0;
  std::size_t n_collect = 0;
};

// Stationary law of the constant-coefficient OU flow: N(0, sigma^2 / 2k).
ReferenceMeasure ou_invariant(double k, double sigma);

// Long constant-step run as an empirical stand-in for the invariant law.
// Discards burn_in steps, returns the ensemble after n_collect more, and
// probes stationarity: the first two moments at n_collect and n_collect/2
// must agree within 3 standard errors.
ReferenceMeasure empirical_invariant(const OneStepModel& model, double gamma,
                                     std::size_t burn_in, std::size_t n_collect,
                                     std::size_t n_particles, uint64_t seed,
                                     const Ensemble& mu0, const ExecPolicy& exec = {});

// W2 between two 1-d Gaussians: sqrt((m1-m2)^2 + (sqrt(v1)-sqrt(v2))^2).
double gaussian_w2_1d(double m1, double v1, double m2, double v2);

// Moment-matched distance: fit a Gaussian to the (1-d) ensemble and take
// the closed-form W2 to the reference Gaussian.  Dodges the O(N^{-1/2})
// bias of the empirical estimator.
double moment_matched_w2(const Ensemble& mu, const ReferenceMeasure& ref);

struct RateReport {
  std::vector<std::size_t> checkpoints;
  std::vector<double> distances;      // W_k (the distance, not its power)
  std::vector<bool> usable;           // W_k > 5 * bias_floor
  double bias_floor = 0.0;
  double p = 2.0;
  double slope = 0.0;                 // of log W_k^p vs log n_k
  double slope_std_error = 0.0;
  double predicted = 1.0;             // exponent b* ^ eps
  bool log_corrected = false;         // divide W^p by ln(1+n) before the fit
  bool pass = false;                  // slope <= -predicted + 0.3 (one-sided)
  std::size_t usable_count = 0;
};

inline constexpr double kRateTolerance = 0.3;
inline constexpr double kBiasFloorFactor = 5.0;

// Thrown when fewer than 4 checkpoints carry signal above the bias floor.
struct BiasStarvation : std::runtime_error {
  explicit BiasStarvation(std::size_t usable);
  std::size_t usable;
};

// Log-log least squares of W_k^p against n_k on the bias-filtered
// checkpoints.  One-sided pass: the fitted decay may be faster than
// predicted but not slower by more than the tolerance.
RateReport fit_rate(const std::vector<std::size_t>& checkpoints,
                    const std::vector<double>& distances, double p, double predicted,
                    double bias_floor, bool log_corrected = false);

// Median moment-matched (or exact empirical) distance between independent
// same-law ensembles: the resolution floor of the distance estimate.
double bias_floor_gaussian(const ReferenceMeasure& ref, std::size_t n, int n_seeds,
                           uint64_t seed, bool moment_matched);

struct VerdictClause {
  std::string name;
  bool applicable = true;
  bool pass = false;
  std::string detail;
};

struct TheoremVerdict {
  std::string theorem_id;
  std::string regime_condition;   // e.g. "2 b_bar > C_sigma"
  double regime_margin = 0.0;     // positive when the condition holds
  bool regime_holds = false;
  std::vector<VerdictClause> clauses;
  std::string overall;            // PASS / FAIL / REGIME_VIOLATED
};

// Aggregates per-clause pass/fail from run artifacts.  When the declared
// regime condition fails, rate clauses are reported but not judged.
TheoremVerdict theorem_verdict(const std::string& theorem_id,
                               const std::string& regime_condition, double regime_margin,
                               const std::optional<MonitorReport>& monitor,
                               const std::optional<CouplingEstimate>& coupling,
                               const std::optional<RateReport>& rate);

std::string verdict_to_json(const TheoremVerdict& v);

}  // namespace ergo
