#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ergo/measure.hpp"
#include "ergo/model.hpp"
#include "ergo/schedule.hpp"

namespace ergo {

// Thrown when a state turns non-finite; carries where it happened.
struct BlowupError : std::runtime_error {
  BlowupError(std::size_t step, std::size_t particle);
  std::size_t step;
  std::size_t particle;
};

// Composes the one-step operator along the grid: step k advances from
// t_{start+k-1} to t_{start+k} with noise keyed by (seed, start+k).
// Mean-field models receive the pre-step ensemble snapshot as the law.
// Returns the ensemble after every requested checkpoint (0 = initial law);
// restarting from a checkpoint with start_index advanced reproduces the
// long run bit-exactly.
std::map<std::size_t, Ensemble> run_scheme(
    const OneStepModel& model, const Ensemble& mu0, const TimeGrid& grid,
    std::size_t n_steps, uint64_t seed, const std::set<std::size_t>& checkpoints,
    const ExecPolicy& exec = {}, std::size_t start_index = 0);

struct FLParams {
  double b_bar;   // contraction rate > 0
  double c_bar;   // additive constant >= 0
  double h;       // step cap in (0,1)
  double p = 2.0; // moment exponent
  double slack_sigmas = 3.0;  // Monte-Carlo slack in moment standard errors
};

struct MonitorRow {
  std::size_t step;
  double t;
  double moment;      // a_k = ||Theta^pi(mu0)||_p^p
  double bound;       // ||mu0||_p^p + C e^b / b + slack
  double telescoped;  // e^{-b(t_k-t0)} a_0 + C e^b / b + slack
  bool pass;
};

struct MonitorReport {
  std::vector<MonitorRow> rows;
  bool pass = true;
  std::size_t first_violation = 0;  // step index, valid when !pass
};

// Tracks the p-th moment along the run and checks the uniform bound
// max_k a_k <= ||mu0||_p^p + (c_bar e^{b_bar} / b_bar) + slack, where the
// slack covers Monte-Carlo error (slack_sigmas times the per-step standard
// error of the moment estimate).
MonitorReport fl_monitor(const OneStepModel& model, const Ensemble& mu0,
                         const TimeGrid& grid, std::size_t n_steps, uint64_t seed,
                         const FLParams& params, const ExecPolicy& exec = {});

// Two margins evolved under shared noise (joint probabilistic
// representation realized by common streams).
struct CoupledEnsemble {
  Ensemble first;
  Ensemble second;
};

struct CoupleStepResult {
  CoupledEnsemble state;
  double d_p_before;  // empirical E d^p(X1, X2) under the index pairing
  double d_p_after;
};

// Advances both margins over [s, t] with the SAME noise streams.  A margin
// with substeps > 1 composes the model over a uniform refinement; the other
// margin then consumes the coarsened Gaussian aggregate of the same streams,
// so Brownian increments stay consistent across resolutions.
CoupleStepResult couple_one_step(const OneStepModel& model1, const OneStepModel& model2,
                                 const CoupledEnsemble& coupled, double s, double t,
                                 uint64_t seed, double p, int substeps1 = 1,
                                 int substeps2 = 1, const ExecPolicy& exec = {});

struct CouplingEstimate {
  double b_star = 0.0;
  double c_star = 0.0;
  double b_std_error = 0.0;
  double c_std_error = 0.0;
  double eps = 1.0;
  double d_p_before = 0.0;
  double gamma_factor = 0.0;  // Gamma_p(mu1, mu2)
  std::vector<double> gammas;
  std::vector<double> responses;  // y(gamma) = (d_after - d_before)/gamma
  std::vector<double> response_std_errors;  // across-rep Monte-Carlo error
  std::vector<double> residuals;
  bool degenerate = false;
  bool smallness_condition = false;  // 2^p C* sigma_{b*,eps} <= 1/2 at the fit
};

// Estimates the one-step coupling constants: for each gamma the response
// y(gamma) = [d_p_after - d_p_before]/gamma (averaged over reps) is fitted
// by least squares to  y = -b* d_p_before + C* Gamma_p gamma^eps.
CouplingEstimate estimate_coupling(const OneStepModel& model1, const OneStepModel& model2,
                                   const Ensemble& mu1, const Ensemble& mu2,
                                   const std::vector<double>& gammas, int reps,
                                   uint64_t seed, double eps_assumed, double p,
                                   int substeps1 = 1, int substeps2 = 1,
                                   const ExecPolicy& exec = {});

// Synchronous coarse-vs-fine one-step error: the fine reference composes
// `substeps` steps whose Brownian increments sum to the coarse one.
// Returns (E d^p(coarse, fine))^{1/p}, an upper bound on the W_p gap.
double one_step_error(const OneStepModel& coarse, const OneStepModel& fine_reference,
                      const Ensemble& mu, double s, double t, int substeps,
                      uint64_t seed, double p, const ExecPolicy& exec = {});

// Empirical E d^p between margins under the index pairing.
double pair_distance_p(const CoupledEnsemble& c, double p);

// Order the two margins by sorting (dim 1): the optimal coupling on the line.
CoupledEnsemble sorted_pairing_1d(const Ensemble& mu1, const Ensemble& mu2);

}  // namespace ergo
