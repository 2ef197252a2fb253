#pragma once

#include <cstdint>

#include "ergo/ensemble.hpp"

namespace ergo {

struct MetricConfig {
  double p = 2.0;  // Wasserstein exponent, >= 1; Euclidean ground distance
};

// (1/N) sum_i |x_i - x0|^p, i.e. the p-th power of the pseudo-norm
// (equivalently W_p(mu, delta_x0)^p).
double pseudo_norm(const Ensemble& mu, const MetricConfig& cfg);

// Moment factor 1 + ||mu||_p^p + ||nu||_p^p.
double gamma_p(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg);

// Exact W_p on the line: sort both samples and pair order statistics.
// Requires dim 1 and equal sizes; returns the distance, not its p-th power.
double wp_exact_1d(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg);

// Exact W_p in any dimension via minimal-cost bipartite assignment with
// cost |x-y|^p.  O(N^3); sizes must match and stay below the cap.
inline constexpr std::size_t kAssignmentCap = 256;
double wp_exact_assignment(const Ensemble& mu, const Ensemble& nu,
                           const MetricConfig& cfg,
                           std::size_t cap = kAssignmentCap);

// Sliced W_p: average of wp_exact_1d^p over n_proj random unit directions,
// p-th root of the average.  Deterministic given the seed; projection j
// draws its direction from a sub-stream keyed by (seed, j).
double wp_sliced(const Ensemble& mu, const Ensemble& nu, const MetricConfig& cfg,
                 int n_proj, uint64_t seed);

// Resample to a target size: quantile resampling in dim 1 (sorted
// interpolation at mid-rank quantiles), seeded bootstrap draw otherwise.
Ensemble resample(const Ensemble& mu, std::size_t target_n, uint64_t seed);

}  // namespace ergo
