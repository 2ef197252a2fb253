#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ergo/ensemble.hpp"
#include "ergo/rng.hpp"

namespace ergo {

// Worker count for per-particle parallelism.  Results are required to be
// independent of the value: particles use counter-based streams and write
// disjoint state, so any static partition yields identical output.
struct ExecPolicy {
  int workers = 1;
};

void parallel_for(std::size_t n, const ExecPolicy& exec,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

enum class NoiseKind { kGaussian, kJump };

// One-step transition operator on ensembles.  step() must preserve the
// point count and the constraint domain, and must be deterministic given
// (state, law, s, t, noise) regardless of worker count.  Mean-field models
// read the law snapshot only; it is never mutated.
class OneStepModel {
 public:
  virtual ~OneStepModel() = default;

  virtual int dim() const = 0;
  virtual Constraint constraint() const { return Constraint::kUnconstrained; }
  virtual double step_cap() const { return 1.0; }
  virtual bool mean_field() const { return false; }
  virtual NoiseKind noise_kind() const { return NoiseKind::kGaussian; }
  virtual std::string name() const = 0;

  virtual void step(Ensemble& state, const Ensemble& law, double s, double t,
                    const StepNoise& noise, const ExecPolicy& exec) const = 0;
};

}  // namespace ergo
