#include "ergo/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo {

TimeGrid::TimeGrid(GridRule rule, double h, double t0) : rule_(rule), h_(h), t0_(t0) {
  gamma_.push_back(0.0);  // gamma_0 unused
  t_.push_back(t0);
}

TimeGrid TimeGrid::harmonic(double h, double t0) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("harmonic grid needs h in (0,1)");
  return TimeGrid(GridRule::kHarmonic, h, t0);
}

TimeGrid TimeGrid::uniform(double gamma, double t0) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("uniform grid needs gamma in (0,1)");
  return TimeGrid(GridRule::kUniform, gamma, t0);
}

void TimeGrid::extend(std::size_t n) const {
  while (gamma_.size() <= n) {
    const std::size_t k = gamma_.size();
    const double g = rule_ == GridRule::kHarmonic ? 1.0 / (double(k) + 1.0 / h_) : h_;
    gamma_.push_back(g);
    // Kahan step: t_k = t_{k-1} + g with carried compensation.
    const double y = g - kahan_c_;
    const double t = t_.back() + y;
    kahan_c_ = (t - t_.back()) - y;
    t_.push_back(t);
  }
}

double TimeGrid::gamma(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("gamma is defined for n >= 1");
  extend(n);
  return gamma_[n];
}

double TimeGrid::t(std::size_t n) const {
  extend(n);
  return t_[n];
}

std::vector<double> sigma_series(const TimeGrid& grid, const SigmaParams& params,
                                 std::size_t n_max) {
  if (!(params.b > 0.0) || !(params.eps > 0.0)) {
    throw std::invalid_argument("sigma needs b > 0 and eps > 0");
  }
  std::vector<double> out(n_max + 1);
  out[0] = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double g = grid.gamma(n);
    out[n] = std::exp(-params.b * g) * out[n - 1] + std::pow(g, 1.0 + params.eps);
  }
  return out;
}

double sigma(const TimeGrid& grid, const SigmaParams& params, std::size_t n) {
  return sigma_series(grid, params, n).back();
}

double varpi(const TimeGrid& grid, std::size_t n_probe) {
  if (n_probe < 2) throw std::invalid_argument("varpi probe needs n_probe >= 2");
  double best = 0.0;
  for (std::size_t n = n_probe / 2; n <= n_probe; ++n) {
    const double g0 = grid.gamma(n);
    const double g1 = grid.gamma(n + 1);
    best = std::max(best, (g0 - g1) / (g1 * g1));
  }
  return best;
}

namespace {

BoundCheck run_ratio_check(const std::string& label, const std::vector<double>& ratio,
                           std::size_t n_max) {
  BoundCheck c;
  c.shape = label;
  const std::size_t split = n_max / 10;
  const std::size_t split_prev = n_max / 100;
  double max_at_prev = 0.0, max_at_split = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double r = ratio[n];
    c.overall_max = std::max(c.overall_max, r);
    if (n == split_prev) max_at_prev = c.overall_max;
    if (n == split) max_at_split = c.overall_max;
    if (n <= split) {
      c.early_max = std::max(c.early_max, r);
    } else {
      c.late_max = std::max(c.late_max, r);
    }
  }
  c.growth_last = std::max(0.0, c.overall_max - max_at_split);
  c.growth_prev = std::max(0.0, max_at_split - max_at_prev);
  const bool decade_stable = c.late_max <= 1.01 * c.early_max;
  const bool contracting =
      c.growth_last <= 0.9 * c.growth_prev + 1e-12 * c.overall_max;
  c.pass = decade_stable || contracting;
  return c;
}

}  // namespace

BoundReport check_sigma_bound(const TimeGrid& grid, const SigmaParams& params,
                              std::size_t n_max, double lambda) {
  if (n_max < 1000) throw std::invalid_argument("sigma bound check needs n_max >= 1000");
  const auto sig = sigma_series(grid, params, n_max);
  BoundReport report;

  const double decay = std::min(params.b, params.eps);
  const bool log_corrected = params.b == params.eps;
  std::vector<double> ratio(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    double shape = std::pow(double(n), -decay);
    if (log_corrected) shape *= std::log1p(double(n));
    ratio[n] = sig[n] / shape;
  }
  const std::string label = log_corrected
      ? "n^-eps * ln(1+n)"
      : "n^-(b min eps)";
  report.checks.push_back(run_ratio_check(label, ratio, n_max));

  if (lambda > 0.0) {
    for (std::size_t n = 1; n <= n_max; ++n) {
      ratio[n] = sig[n] / std::pow(grid.gamma(n), lambda);
    }
    report.checks.push_back(run_ratio_check("gamma_n^lambda", ratio, n_max));
  }

  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

BoundReport check_exp_envelope(const TimeGrid& grid, std::size_t n_max) {
  if (grid.rule() != GridRule::kHarmonic) {
    throw std::invalid_argument("the exponential step envelope is specific to harmonic grids");
  }
  BoundReport report;
  BoundCheck c;
  c.shape = "h * exp(-(t_n - t0)) >= gamma_n";
  c.pass = true;
  const double t0 = grid.t(0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double lhs = grid.h() * std::exp(-(grid.t(n) - t0));
    const double g = grid.gamma(n);
    const double r = g / lhs;
    c.overall_max = std::max(c.overall_max, r);
    if (lhs < g) {
      c.pass = false;
    }
  }
  report.checks.push_back(c);
  report.pass = c.pass;
  return report;
}

}  // namespace ergo
