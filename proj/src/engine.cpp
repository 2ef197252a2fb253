#include "ergo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ergo {

namespace {

void check_finite_or_throw(const Ensemble& e, std::size_t step) {
  const auto& data = e.data();
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k])) throw BlowupError(step, k / std::size_t(e.dim()));
  }
}

// Moment a = mean of d(x, x0)^p and its standard error.
struct MomentEstimate {
  double value;
  double std_error;
};

MomentEstimate moment_with_se(const Ensemble& e, double p) {
  const auto& x0 = e.base_point();
  double sum = 0.0, sum_sq = 0.0;
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto x = e.point(i);
    double sq = 0.0;
    for (int j = 0; j < e.dim(); ++j) {
      const double d = x[j] - x0[j];
      sq += d * d;
    }
    const double v = p == 2.0 ? sq : std::pow(sq, p / 2.0);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / double(n);
  const double var = std::max(0.0, sum_sq / double(n) - mean * mean);
  return {mean, std::sqrt(var / double(n))};
}

// One engine step: snapshot the law for mean-field models, advance, verify.
void advance(const OneStepModel& model, Ensemble& state, double s, double t,
             const StepNoise& noise, const ExecPolicy& exec, std::size_t step_label) {
  if (model.mean_field()) {
    const Ensemble law = state;  // immutable pre-step snapshot
    model.step(state, law, s, t, noise, exec);
  } else {
    model.step(state, state, s, t, noise, exec);
  }
  check_finite_or_throw(state, step_label);
}

// Advances one margin over [s, t], possibly through a uniform refinement.
// total_substeps is the finest resolution used by either margin of a coupled
// step; a margin running coarser consumes the Gaussian aggregate of the fine
// streams so increments match across resolutions.
void advance_margin(const OneStepModel& model, Ensemble& state, double s, double t,
                    int substeps, int total_substeps, uint64_t seed,
                    std::size_t step_base, const ExecPolicy& exec) {
  const double dt = t - s;
  if (substeps == total_substeps) {
    for (int j = 0; j < substeps; ++j) {
      const double a = s + dt * double(j) / substeps;
      const double b = j + 1 == substeps ? t : s + dt * double(j + 1) / substeps;
      StepNoise noise(seed, step_base + std::size_t(j));
      advance(model, state, a, b, noise, exec, step_base + std::size_t(j));
    }
    return;
  }
  if (substeps != 1) {
    throw std::invalid_argument("coupled margins need substeps equal or one side = 1");
  }
  std::vector<uint64_t> indices(total_substeps);
  std::vector<double> dts(total_substeps, dt / total_substeps);
  std::iota(indices.begin(), indices.end(), step_base);
  const StepNoise noise = StepNoise::coarsened(seed, std::move(indices), std::move(dts));
  advance(model, state, s, t, noise, exec, step_base);
}

}  // namespace

BlowupError::BlowupError(std::size_t step_, std::size_t particle_)
    : std::runtime_error("non-finite state at step " + std::to_string(step_) +
                         ", particle " + std::to_string(particle_)),
      step(step_),
      particle(particle_) {}

std::map<std::size_t, Ensemble> run_scheme(const OneStepModel& model, const Ensemble& mu0,
                                           const TimeGrid& grid, std::size_t n_steps,
                                           uint64_t seed,
                                           const std::set<std::size_t>& checkpoints,
                                           const ExecPolicy& exec, std::size_t start_index) {
  mu0.validate();
  if (mu0.dim() != model.dim()) throw std::invalid_argument("run_scheme: dimension mismatch");
  for (std::size_t c : checkpoints) {
    if (c > n_steps) throw std::invalid_argument("run_scheme: checkpoint beyond n_steps");
  }
  if (n_steps > 0 && grid.gamma(start_index + 1) > model.step_cap()) {
    throw std::invalid_argument("run_scheme: grid step exceeds the model step cap");
  }
  std::map<std::size_t, Ensemble> out;
  Ensemble state = mu0;
  if (checkpoints.count(0)) out.emplace(0, state);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const std::size_t idx = start_index + k;
    StepNoise noise(seed, idx);
    advance(model, state, grid.t(idx - 1), grid.t(idx), noise, exec, idx);
    if (checkpoints.count(k)) out.emplace(k, state);
  }
  return out;
}

MonitorReport fl_monitor(const OneStepModel& model, const Ensemble& mu0,
                         const TimeGrid& grid, std::size_t n_steps, uint64_t seed,
                         const FLParams& params, const ExecPolicy& exec) {
  if (!(params.b_bar > 0.0) || params.c_bar < 0.0 || !(params.h > 0.0 && params.h < 1.0)) {
    throw std::invalid_argument("fl_monitor: need b_bar > 0, c_bar >= 0, h in (0,1)");
  }
  if (n_steps > 0 && grid.gamma(1) > params.h) {
    throw std::invalid_argument("fl_monitor: first grid step exceeds the declared cap h");
  }
  mu0.validate();
  const double p = params.p;
  const double budget = params.c_bar * std::exp(params.b_bar) / params.b_bar;
  const auto m0 = moment_with_se(mu0, p);
  const double t0 = grid.t(0);

  MonitorReport report;
  report.rows.reserve(n_steps + 1);
  Ensemble state = mu0;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    if (k > 0) {
      StepNoise noise(seed, k);
      advance(model, state, grid.t(k - 1), grid.t(k), noise, exec, k);
    }
    const auto mk = moment_with_se(state, p);
    const double slack = params.slack_sigmas * (mk.std_error + m0.std_error);
    MonitorRow row;
    row.step = k;
    row.t = grid.t(k);
    row.moment = mk.value;
    row.bound = m0.value + budget + slack;
    row.telescoped = std::exp(-params.b_bar * (row.t - t0)) * m0.value + budget + slack;
    row.pass = row.moment <= row.bound;
    if (!row.pass && report.pass) {
      report.pass = false;
      report.first_violation = k;
    }
    report.rows.push_back(row);
    if (!report.pass && report.rows.size() > report.first_violation + 8) {
      break;  // a divergent run is established; no need to chase it further
    }
  }
  return report;
}

double pair_distance_p(const CoupledEnsemble& c, double p) {
  if (c.first.size() != c.second.size() || c.first.dim() != c.second.dim()) {
    throw std::invalid_argument("coupled ensemble margins must match");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < c.first.size(); ++i) {
    auto x = c.first.point(i);
    auto y = c.second.point(i);
    double sq = 0.0;
    for (int j = 0; j < c.first.dim(); ++j) {
      const double d = x[j] - y[j];
      sq += d * d;
    }
    acc += p == 2.0 ? sq : std::pow(sq, p / 2.0);
  }
  return acc / double(c.first.size());
}

CoupledEnsemble sorted_pairing_1d(const Ensemble& mu1, const Ensemble& mu2) {
  if (mu1.dim() != 1 || mu2.dim() != 1 || mu1.size() != mu2.size()) {
    throw std::invalid_argument("sorted pairing needs matching 1-d ensembles");
  }
  CoupledEnsemble c{mu1, mu2};
  std::sort(c.first.data().begin(), c.first.data().end());
  std::sort(c.second.data().begin(), c.second.data().end());
  return c;
}

CoupleStepResult couple_one_step(const OneStepModel& model1, const OneStepModel& model2,
                                 const CoupledEnsemble& coupled, double s, double t,
                                 uint64_t seed, double p, int substeps1, int substeps2,
                                 const ExecPolicy& exec) {
  if (model1.dim() != model2.dim()) {
    throw std::invalid_argument("couple_one_step: models must share dim");
  }
  if (substeps1 < 1 || substeps2 < 1) {
    throw std::invalid_argument("couple_one_step: substeps must be >= 1");
  }
  const int total = std::max(substeps1, substeps2);
  CoupleStepResult res{coupled, pair_distance_p(coupled, p), 0.0};
  advance_margin(model1, res.state.first, s, t, substeps1, total, seed, 1, exec);
  advance_margin(model2, res.state.second, s, t, substeps2, total, seed, 1, exec);
  res.d_p_after = pair_distance_p(res.state, p);
  return res;
}

CouplingEstimate estimate_coupling(const OneStepModel& model1, const OneStepModel& model2,
                                   const Ensemble& mu1, const Ensemble& mu2,
                                   const std::vector<double>& gammas, int reps,
                                   uint64_t seed, double eps_assumed, double p,
                                   int substeps1, int substeps2, const ExecPolicy& exec) {
  if (gammas.empty() || reps < 1) {
    throw std::invalid_argument("estimate_coupling: need gammas and reps >= 1");
  }
  CoupledEnsemble base{mu1, mu2};
  CouplingEstimate est;
  est.eps = eps_assumed;
  est.d_p_before = pair_distance_p(base, p);
  est.gamma_factor = gamma_p(mu1, mu2, MetricConfig{p});
  est.gammas = gammas;

  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const double g = gammas[gi];
    double acc = 0.0, acc_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      const uint64_t rep_seed = seed + 0x9E3779B97F4A7C15ull * uint64_t(gi * reps + r + 1);
      const auto step = couple_one_step(model1, model2, base, 0.0, g, rep_seed, p,
                                        substeps1, substeps2, exec);
      const double y = (step.d_p_after - step.d_p_before) / g;
      acc += y;
      acc_sq += y * y;
    }
    const double mean = acc / reps;
    est.responses.push_back(mean);
    const double var = std::max(0.0, acc_sq / reps - mean * mean);
    est.response_std_errors.push_back(reps > 1 ? std::sqrt(var / (reps - 1)) : 0.0);
  }

  // Least squares on y = alpha + beta * gamma^eps with alpha = -b* D0 and
  // beta = C* Gamma_p.
  const std::size_t m = gammas.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::pow(gammas[i], eps_assumed);
    sx += x;
    sy += est.responses[i];
    sxx += x * x;
    sxy += x * est.responses[i];
  }
  const double det = double(m) * sxx - sx * sx;
  const bool all_zero =
      std::all_of(est.responses.begin(), est.responses.end(),
                  [](double y) { return y == 0.0; });
  if (std::abs(det) < 1e-14 * double(m) * sxx || est.d_p_before == 0.0 || all_zero) {
    est.degenerate = true;
    return est;
  }
  const double alpha = (sy * sxx - sx * sxy) / det;
  const double beta = (double(m) * sxy - sx * sy) / det;
  est.b_star = -alpha / est.d_p_before;
  est.c_star = beta / est.gamma_factor;

  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::pow(gammas[i], eps_assumed);
    const double r = est.responses[i] - (alpha + beta * x);
    est.residuals.push_back(r);
    rss += r * r;
  }
  if (m > 2) {
    const double s2 = rss / double(m - 2);
    est.b_std_error = std::sqrt(s2 * sxx / det) / est.d_p_before;
    est.c_std_error = std::sqrt(s2 * double(m) / det) / est.gamma_factor;
  }

  // Smallness probe at the fitted constants: 2^p C* max_k sigma(k) <= 1/2.
  // Reported only; C* is an estimate, so this cannot be certified.
  if (est.c_star > 0.0 && est.b_star > 0.0) {
    TimeGrid grid = TimeGrid::harmonic(0.5);
    const auto series = sigma_series(grid, SigmaParams{est.b_star, eps_assumed}, 500);
    const double peak = *std::max_element(series.begin(), series.end());
    est.smallness_condition = std::pow(2.0, p) * est.c_star * peak <= 0.5;
  }
  return est;
}

double one_step_error(const OneStepModel& coarse, const OneStepModel& fine_reference,
                      const Ensemble& mu, double s, double t, int substeps, uint64_t seed,
                      double p, const ExecPolicy& exec) {
  if (substeps < 2) throw std::invalid_argument("one_step_error: substeps must be >= 2");
  if (coarse.dim() != fine_reference.dim()) {
    throw std::invalid_argument("one_step_error: models must share dim");
  }
  if (coarse.noise_kind() != NoiseKind::kGaussian ||
      fine_reference.noise_kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("one_step_error: incompatible noise conventions");
  }
  CoupledEnsemble pair{mu, mu};
  advance_margin(coarse, pair.first, s, t, 1, substeps, seed, 1, exec);
  advance_margin(fine_reference, pair.second, s, t, substeps, substeps, seed, 1, exec);
  return std::pow(pair_distance_p(pair, p), 1.0 / p);
}

}  // namespace ergo
