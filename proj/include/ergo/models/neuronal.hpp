#pragma once

#include <string>

#include "ergo/model.hpp"

namespace ergo::models {

// Nonnegative drift families for the membrane potential.
struct NeuronDrift {
  enum class Kind { kConstant, kDecay };
  Kind kind = Kind::kConstant;
  double c = 0.0;  // level
  double k = 0.0;  // decay: b(x) = max(0, c - k x)

  double operator()(double x) const {
    return kind == Kind::kConstant ? c : std::max(0.0, c - k * x);
  }
  double lipschitz() const { return kind == Kind::kConstant ? 0.0 : k; }
};

// Spiking-rate families; the jump intensity is f_M = min(f, M).
struct SpikeRate {
  enum class Kind { kConstant, kLinear };
  Kind kind = Kind::kLinear;
  double value = 1.0;  // constant: rate level; linear: slope c_f

  double operator()(double x) const { return kind == Kind::kConstant ? value : value * x; }
  double lipschitz() const { return kind == Kind::kConstant ? 0.0 : value; }
};

struct NeuronalSpec {
  NeuronDrift drift;
  SpikeRate rate;
  double coupling_j = 0.0;    // mean-field weight J
  double rate_cap = 1.0;      // dominating rate M for thinning
  double contraction_b = 0.0; // declared b-bar of the drift/jump contraction

  double c_f() const { return rate.lipschitz(); }
  // Theorem regimes for the two distances.
  bool regime_w2() const { return contraction_b - 2.0 * c_f() * coupling_j > 0.0; }
  bool regime_w1() const { return contraction_b - c_f() * coupling_j > 0.0; }
};

// Mean-field PDMP step: the drift rate r = b(x0) + J * mean_law[f] is frozen
// at time s; the state follows dx/dt = r between spikes; spikes arrive by
// thinning against the cap M with acceptance f_M(x-)/M evaluated at the
// running in-step state, and reset the state to 0.  Sampling is exact.
class NeuronalModel final : public OneStepModel {
 public:
  explicit NeuronalModel(NeuronalSpec spec);

  int dim() const override { return 1; }
  Constraint constraint() const override { return Constraint::kNonnegativeOrthant; }
  bool mean_field() const override { return true; }
  NoiseKind noise_kind() const override { return NoiseKind::kJump; }
  std::string name() const override { return "neuronal"; }
  const NeuronalSpec& spec() const { return spec_; }

  void step(Ensemble& state, const Ensemble& law, double s, double t,
            const StepNoise& noise, const ExecPolicy& exec) const override;

 private:
  NeuronalSpec spec_;
};

}  // namespace ergo::models
