#include "ergo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ergo/schedule.hpp"

namespace ergo {

namespace {

struct Moments {
  double mean;
  double var;
  double se_mean;
  double se_var;
};

// Scalar probe statistic per point: the coordinate in dim 1, the Euclidean
// distance to the base point otherwise.
std::vector<double> probe_values(const Ensemble& e) {
  if (e.dim() == 1) return e.data();
  std::vector<double> out(e.size());
  const auto& x0 = e.base_point();
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto x = e.point(i);
    double sq = 0.0;
    for (int j = 0; j < e.dim(); ++j) sq += (x[j] - x0[j]) * (x[j] - x0[j]);
    out[i] = std::sqrt(sq);
  }
  return out;
}

Moments first_two_moments(const Ensemble& e) {
  const auto d = probe_values(e);
  const double n = double(d.size());
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : d) {
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n;
  double var = 0.0;
  for (double v : d) {
    const double c = v - mean;
    var += c * c;
    s3 += c * c * c;
    s4 += c * c * c * c;
  }
  var /= n;
  const double m4 = s4 / n;
  const double se_mean = std::sqrt(var / n);
  const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / n);
  return {mean, var, se_mean, se_var};
}

}  // namespace

ReferenceMeasure ou_invariant(double k, double sigma) {
  if (!(k > 0.0)) throw std::invalid_argument("ou_invariant: k must be positive");
  ReferenceMeasure ref;
  ref.kind = ReferenceMeasure::Kind::kAnalyticGaussian;
  ref.mean = 0.0;
  ref.variance = sigma * sigma / (2.0 * k);
  return ref;
}

ReferenceMeasure empirical_invariant(const OneStepModel& model, double gamma,
                                     std::size_t burn_in, std::size_t n_collect,
                                     std::size_t n_particles, uint64_t seed,
                                     const Ensemble& mu0, const ExecPolicy& exec) {
  if (burn_in < 1) throw std::invalid_argument("empirical_invariant: burn_in must be >= 1");
  if (gamma > model.step_cap()) {
    throw std::invalid_argument("empirical_invariant: gamma exceeds the model step cap");
  }
  Ensemble start = mu0;
  if (mu0.size() != n_particles) start = resample(mu0, n_particles, seed ^ 0x5851F42Dull);
  const TimeGrid grid = TimeGrid::uniform(gamma);
  const std::size_t half = burn_in + n_collect / 2;
  const std::size_t full = burn_in + n_collect;
  auto checkpoints = run_scheme(model, start, grid, full, seed, {half, full}, exec);

  const auto a = first_two_moments(checkpoints.at(half));
  const auto b = first_two_moments(checkpoints.at(full));
  const double mean_gap = std::abs(a.mean - b.mean);
  const double var_gap = std::abs(a.var - b.var);
  if (mean_gap > 3.0 * (a.se_mean + b.se_mean) || var_gap > 3.0 * (a.se_var + b.se_var)) {
    std::ostringstream msg;
    msg << "empirical_invariant: stationarity probe failed (mean drift " << mean_gap
        << ", variance drift " << var_gap << ")";
    throw std::runtime_error(msg.str());
  }

  ReferenceMeasure ref;
  ref.kind = ReferenceMeasure::Kind::kEmpirical;
  ref.sample = std::move(checkpoints.at(full));
  ref.mean = b.mean;
  ref.variance = b.var;
  ref.seed = seed;
  ref.step = gamma;
  ref.burn_in = burn_in;
  ref.n_collect = n_collect;
  return ref;
}

double gaussian_w2_1d(double m1, double v1, double m2, double v2) {
  if (v1 < 0.0 || v2 < 0.0) throw std::invalid_argument("gaussian_w2_1d: negative variance");
  const double dm = m1 - m2;
  const double ds = std::sqrt(v1) - std::sqrt(v2);
  return std::sqrt(dm * dm + ds * ds);
}

double moment_matched_w2(const Ensemble& mu, const ReferenceMeasure& ref) {
  if (mu.dim() != 1) throw std::invalid_argument("moment_matched_w2 expects dim 1");
  const auto m = first_two_moments(mu);
  return gaussian_w2_1d(m.mean, m.var, ref.mean, ref.variance);
}

BiasStarvation::BiasStarvation(std::size_t usable_)
    : std::runtime_error("bias floor starvation: only " + std::to_string(usable_) +
                         " usable checkpoints"),
      usable(usable_) {}

RateReport fit_rate(const std::vector<std::size_t>& checkpoints,
                    const std::vector<double>& distances, double p, double predicted,
                    double bias_floor, bool log_corrected) {
  if (checkpoints.size() != distances.size() || checkpoints.empty()) {
    throw std::invalid_argument("fit_rate: checkpoint/distance size mismatch");
  }
  RateReport report;
  report.checkpoints = checkpoints;
  report.distances = distances;
  report.p = p;
  report.predicted = predicted;
  report.bias_floor = bias_floor;
  report.log_corrected = log_corrected;

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const bool ok = distances[i] > kBiasFloorFactor * bias_floor;
    report.usable.push_back(ok);
    if (!ok) continue;
    double wpow = p * std::log(distances[i]);
    if (log_corrected) wpow -= std::log(std::log1p(double(checkpoints[i])));
    xs.push_back(std::log(double(checkpoints[i])));
    ys.push_back(wpow);
  }
  report.usable_count = xs.size();
  if (xs.size() < 4) throw BiasStarvation(xs.size());

  const double n = double(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
  report.slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + report.slope * xs[i]);
    rss += r * r;
  }
  if (xs.size() > 2) {
    report.slope_std_error = std::sqrt(rss / (n - 2.0) * n / det);
  }
  report.pass = report.slope <= -predicted + kRateTolerance;
  return report;
}

double bias_floor_gaussian(const ReferenceMeasure& ref, std::size_t n, int n_seeds,
                           uint64_t seed, bool moment_matched) {
  if (ref.kind != ReferenceMeasure::Kind::kAnalyticGaussian) {
    throw std::invalid_argument("bias floor sampling needs an analytic reference");
  }
  const double sd = std::sqrt(ref.variance);
  std::vector<double> estimates;
  for (int s = 0; s < n_seeds; ++s) {
    Ensemble a(n, 1), b(n, 1);
    NoiseStream sa(seed, uint64_t(2 * s), 0, 0), sb(seed, uint64_t(2 * s + 1), 0, 0);
    for (std::size_t i = 0; i < n; ++i) {
      a.data()[i] = ref.mean + sd * sa.gaussian();
      b.data()[i] = ref.mean + sd * sb.gaussian();
    }
    if (moment_matched) {
      const auto ma = first_two_moments(a);
      estimates.push_back(gaussian_w2_1d(ma.mean, ma.var, ref.mean, ref.variance));
      const auto mb = first_two_moments(b);
      estimates.push_back(gaussian_w2_1d(mb.mean, mb.var, ref.mean, ref.variance));
    } else {
      estimates.push_back(wp_exact_1d(a, b, MetricConfig{2.0}));
    }
  }
  std::sort(estimates.begin(), estimates.end());
  return estimates[estimates.size() / 2];
}

TheoremVerdict theorem_verdict(const std::string& theorem_id,
                               const std::string& regime_condition, double regime_margin,
                               const std::optional<MonitorReport>& monitor,
                               const std::optional<CouplingEstimate>& coupling,
                               const std::optional<RateReport>& rate) {
  if (!monitor && !coupling && !rate) {
    throw std::invalid_argument("theorem_verdict: no run artifacts supplied");
  }
  TheoremVerdict v;
  v.theorem_id = theorem_id;
  v.regime_condition = regime_condition;
  v.regime_margin = regime_margin;
  v.regime_holds = regime_margin > 0.0;

  bool all_pass = true;
  if (monitor) {
    VerdictClause c{"p_bounded", true, monitor->pass, ""};
    if (!monitor->pass) {
      c.detail = "moment bound violated at step " + std::to_string(monitor->first_violation);
    }
    all_pass = all_pass && c.pass;
    v.clauses.push_back(c);
  }
  if (coupling) {
    VerdictClause c{"coupling_contraction", true, false, ""};
    if (coupling->degenerate) {
      c.detail = "degenerate fit";
    } else {
      c.pass = coupling->b_star > 0.0;
      std::ostringstream os;
      os << "b* = " << coupling->b_star << " (se " << coupling->b_std_error << ")";
      c.detail = os.str();
    }
    all_pass = all_pass && c.pass;
    v.clauses.push_back(c);
  }
  if (rate) {
    VerdictClause c{"rate_slope", v.regime_holds, rate->pass, ""};
    std::ostringstream os;
    os << "slope " << rate->slope << " vs predicted -" << rate->predicted;
    c.detail = os.str();
    if (v.regime_holds) all_pass = all_pass && c.pass;
    v.clauses.push_back(c);
  }
  v.overall = !v.regime_holds ? "REGIME_VIOLATED" : (all_pass ? "PASS" : "FAIL");
  return v;
}

std::string verdict_to_json(const TheoremVerdict& v) {
  nlohmann::json j;
  j["theorem"] = v.theorem_id;
  j["regime_condition"] = v.regime_condition;
  j["regime_margin"] = v.regime_margin;
  j["regime_holds"] = v.regime_holds;
  j["overall"] = v.overall;
  j["clauses"] = nlohmann::json::array();
  for (const auto& c : v.clauses) {
    j["clauses"].push_back({{"name", c.name},
                            {"applicable", c.applicable},
                            {"pass", c.pass},
                            {"detail", c.detail}});
  }
  return j.dump(2);
}

}  // namespace ergo
