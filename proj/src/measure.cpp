#include "ergo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ergo/rng.hpp"

namespace ergo {

namespace {

double dist_pow(std::span<const double> x, std::span<const double> y, double p) {
  double sq = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    sq += d * d;
  }
  if (p == 2.0) return sq;
  if (p == 1.0) return std::sqrt(sq);
  return std::pow(sq, p / 2.0);
}

void check_metric(const MetricConfig& cfg) {
  if (!(cfg.p >= 1.0)) throw std::invalid_argument("metric exponent p must be >= 1");
}

// Minimal-cost assignment on a square cost matrix (shortest augmenting
// path with potentials, O(n^3)).  Returns the total cost.
double solve_assignment(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, n);  // column -> row, n = free
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> minv(n + 1, inf);
    std::vector<std::size_t> way(n + 1, n);
    std::vector<char> used(n + 1, 0);
    std::size_t j0 = n;  // virtual start column
    match[n] = i;
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 * n + j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != n);
    // augment along the alternating path
    while (j0 != n) {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += cost[match[j] * n + j];
  return total;
}

}  // namespace

double pseudo_norm(const Ensemble& mu, const MetricConfig& cfg) {
  check_metric(cfg);
  mu.validate();
  const auto& x0 = mu.base_point();
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += dist_pow(mu.point(i), {x0.data(), x0.size()}, cfg.p);
  }
  return acc / double(mu.size());
}

double gamma_p(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("gamma_p: dimension mismatch");
  return 1.0 + pseudo_norm(mu, cfg) + pseudo_norm(nu, cfg);
}

double wp_exact_1d(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg) {
  check_metric(cfg);
  if (mu.dim() != 1 || nu.dim() != 1) throw std::invalid_argument("wp_exact_1d: dim must be 1");
  if (mu.size() != nu.size()) throw std::invalid_argument("wp_exact_1d: size mismatch");
  std::vector<double> a(mu.data()), b(nu.data());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::pow(std::abs(a[i] - b[i]), cfg.p);
  }
  return std::pow(acc / double(a.size()), 1.0 / cfg.p);
}

double wp_exact_assignment(const Ensemble& mu, const Ensemble& nu,
                           const MetricConfig& cfg, std::size_t cap) {
  check_metric(cfg);
  if (mu.dim() != nu.dim()) throw std::invalid_argument("wp_exact_assignment: dimension mismatch");
  if (mu.size() != nu.size()) throw std::invalid_argument("wp_exact_assignment: size mismatch");
  const std::size_t n = mu.size();
  if (n > cap) throw std::invalid_argument("wp_exact_assignment: size above cap");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = dist_pow(mu.point(i), nu.point(j), cfg.p);
    }
  }
  const double total = solve_assignment(cost, n);
  return std::pow(total / double(n), 1.0 / cfg.p);
}

double wp_sliced(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg,
                 int n_proj, uint64_t seed) {
  check_metric(cfg);
  if (mu.dim() != nu.dim()) throw std::invalid_argument("wp_sliced: dimension mismatch");
  if (mu.size() != nu.size()) throw std::invalid_argument("wp_sliced: size mismatch");
  if (n_proj < 1) throw std::invalid_argument("wp_sliced: n_proj must be >= 1");
  const int d = mu.dim();
  std::vector<double> dir(d);
  std::vector<double> pa(mu.size()), pb(nu.size());
  double acc = 0.0;
  for (int k = 0; k < n_proj; ++k) {
    NoiseStream s(seed, uint64_t(k), 0, 0);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int j = 0; j < d; ++j) {
        dir[j] = s.gaussian();
        norm2 += dir[j] * dir[j];
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < d; ++j) dir[j] *= inv;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      auto x = mu.point(i);
      auto y = nu.point(i);
      double sa = 0.0, sb = 0.0;
      for (int j = 0; j < d; ++j) {
        sa += dir[j] * x[j];
        sb += dir[j] * y[j];
      }
      pa[i] = sa;
      pb[i] = sb;
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double proj = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      proj += std::pow(std::abs(pa[i] - pb[i]), cfg.p);
    }
    acc += proj / double(pa.size());
  }
  return std::pow(acc / double(n_proj), 1.0 / cfg.p);
}

Ensemble resample(const Ensemble& mu, std::size_t target_n, uint64_t seed) {
  mu.validate();
  if (target_n == 0) throw std::invalid_argument("resample: target size must be >= 1");
  Ensemble out(target_n, mu.dim(), mu.constraint());
  out.set_base_point(mu.base_point());
  if (mu.dim() == 1) {
    std::vector<double> sorted(mu.data());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i < target_n; ++i) {
      // mid-rank quantile with linear interpolation between order statistics
      const double q = (double(i) + 0.5) / double(target_n);
      const double pos = q * double(n) - 0.5;
      if (pos <= 0.0) {
        out.data()[i] = sorted.front();
      } else if (pos >= double(n - 1)) {
        out.data()[i] = sorted.back();
      } else {
        const std::size_t lo = std::size_t(pos);
        const double w = pos - double(lo);
        out.data()[i] = (1.0 - w) * sorted[lo] + w * sorted[lo + 1];
      }
    }
  } else {
    NoiseStream s(seed, 0, 0, 0);
    for (std::size_t i = 0; i < target_n; ++i) {
      const auto idx = std::size_t(s.uniform() * double(mu.size()));
      const auto src = mu.point(std::min(idx, mu.size() - 1));
      std::copy(src.begin(), src.end(), out.point(i).begin());
    }
  }
  return out;
}

}  // namespace ergo
