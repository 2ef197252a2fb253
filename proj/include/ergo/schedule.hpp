#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ergo {

enum class GridRule { kHarmonic, kUniform };

// Decreasing-step time grid.  Harmonic rule: gamma_n = 1/(n + 1/h) for
// n >= 1, so gamma_n <= h, strictly decreasing, sum divergent.  Uniform
// rule: gamma_n = gamma for all n.  t_n = t0 + sum_{i<=n} gamma_i with
// compensated summation.  The (gamma, t) prefix cache grows append-only.
class TimeGrid {
 public:
  static TimeGrid harmonic(double h, double t0 = 0.0);
  static TimeGrid uniform(double gamma, double t0 = 0.0);

  GridRule rule() const { return rule_; }
  double h() const { return h_; }
  double t0() const { return t0_; }

  double gamma(std::size_t n) const;  // n >= 1
  double t(std::size_t n) const;      // n >= 0

 private:
  TimeGrid(GridRule rule, double h, double t0);
  void extend(std::size_t n) const;

  GridRule rule_;
  double h_;   // step cap (harmonic) or the constant step (uniform)
  double t0_;
  mutable std::vector<double> gamma_;
  mutable std::vector<double> t_;
  mutable double kahan_c_ = 0.0;  // running compensation for t
};

struct SigmaParams {
  double b;    // decay rate > 0
  double eps;  // exponent > 0
};

// sigma_{b,eps}(n) = sum_{i=1}^{n} e^{-b (t_n - t_i)} gamma_i^{1+eps},
// evaluated by the forward recursion
//   sigma(n+1) = e^{-b gamma_{n+1}} sigma(n) + gamma_{n+1}^{1+eps},
// sigma(0) = 0.  Returns the values for n = 0..n_max.
std::vector<double> sigma_series(const TimeGrid& grid, const SigmaParams& params,
                                 std::size_t n_max);
double sigma(const TimeGrid& grid, const SigmaParams& params, std::size_t n);

// Windowed limsup probe for (gamma_n - gamma_{n+1}) / gamma_{n+1}^2:
// max over n in [n_probe/2, n_probe].
double varpi(const TimeGrid& grid, std::size_t n_probe);

struct BoundCheck {
  std::string shape;          // label of the bound shape tested
  double overall_max = 0.0;   // running max of sigma(n)/shape(n) over n <= n_max
  double early_max = 0.0;     // max over n <= n_max/10
  double late_max = 0.0;      // max over n in (n_max/10, n_max]
  double growth_last = 0.0;   // running-max increase over the last decade
  double growth_prev = 0.0;   // running-max increase over the decade before
  bool pass = false;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool pass = true;
};

// Empirical check that sigma(n) is dominated by the predicted shape:
// n^{-(b min eps)} when b != eps, n^{-eps} ln(1+n) when b == eps.  The
// running max of the ratio must stabilize: either its max over the last
// decade of n exceeds the earlier max by at most 1%, or the running-max
// increments are contracting decade over decade (slowly converging ratios,
// e.g. the 1/ln n approach of the log-corrected case, satisfy the second
// clause; a wrong shape grows faster every decade and satisfies neither).
// When lambda > 0 is supplied, the shape gamma_n^lambda is also checked
// (the b <= varpi*eps regime, where lambda < b/varpi is user-chosen).
BoundReport check_sigma_bound(const TimeGrid& grid, const SigmaParams& params,
                              std::size_t n_max, double lambda = 0.0);

// Exact inequality h e^{-(t_n - t0)} >= gamma_n for all n <= n_max
// (harmonic grids only; no tolerance).
BoundReport check_exp_envelope(const TimeGrid& grid, std::size_t n_max);

}  // namespace ergo
