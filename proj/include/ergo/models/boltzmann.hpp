#pragma once

#include <string>
#include <vector>

#include "ergo/model.hpp"
#include "ergo/models/langevin.hpp"

namespace ergo::models {

enum class BoltzmannRegime { kFiniteVariation, kMartingale };

struct JumpAtom {
  double z;       // mark value
  double weight;  // nu({z})
};

// Jump amplitude families c(v, z, x).  All registered families are affine
// in v, so the compensator mean over the law reduces to the law mean.
struct JumpAmplitude {
  enum class Kind { kTowardV, kMarkTimesV, kMarkOnes };
  Kind kind = Kind::kTowardV;
  double scale = 1.0;

  void eval(std::span<const double> v, double z, std::span<const double> x,
            std::span<double> out) const;
  void mean_over_law(std::span<const double> law_mean, double z,
                     std::span<const double> x, std::span<double> out) const;
  double c_bar(double z, int dim) const;  // Lipschitz/growth envelope in the mark
};

// State-dependent jump rates for the finite-variation regime.
struct JumpRate {
  enum class Kind { kConstant, kInverseSq };
  Kind kind = Kind::kConstant;
  double level = 1.0;  // constant: the rate; inverse_sq: level / (1 + |v-x|^2)

  double eval(std::span<const double> v, double z, std::span<const double> x) const;
};

struct BoltzmannSpec {
  BoltzmannRegime regime = BoltzmannRegime::kFiniteVariation;
  int dim = 1;
  std::vector<JumpAtom> atoms;
  JumpAmplitude amplitude;
  JumpRate rate;              // finite-variation regime only
  double rate_cap = 1.0;      // gamma_max dominating the rate (FV only)
  Drift drift = Drift::affine(0.0, 0.0);
  bool running_state_amplitude = false;  // FV: evaluate c and the rate at the
                                         // in-step path instead of freezing at x0

  double nu_total() const;
  double q_constant() const;  // Q = sum_j w_j c_bar(z_j)
  double b_bar() const { return drift.contraction_rate(); }
  bool regime_condition() const {
    return regime == BoltzmannRegime::kFiniteVariation ? 2.0 * q_constant() < b_bar()
                                                       : q_constant() < b_bar();
  }
};

// Finite-variation regime: candidate jumps arrive at rate nu(E) * gamma_max,
// draw a mark (w_j / nu(E)) and a v uniformly from the law points, and are
// accepted with probability gamma_rate / gamma_max (exact thinning).
// Martingale regime: jumps arrive at rate nu(E), every candidate accepted,
// and the exact compensator over the atomic nu and the law is subtracted.
class BoltzmannModel final : public OneStepModel {
 public:
  explicit BoltzmannModel(BoltzmannSpec spec);

  int dim() const override { return spec_.dim; }
  bool mean_field() const override { return true; }
  NoiseKind noise_kind() const override { return NoiseKind::kJump; }
  std::string name() const override {
    return spec_.regime == BoltzmannRegime::kFiniteVariation ? "boltzmann_fv"
                                                             : "boltzmann_martingale";
  }
  const BoltzmannSpec& spec() const { return spec_; }

  void step(Ensemble& state, const Ensemble& law, double s, double t,
            const StepNoise& noise, const ExecPolicy& exec) const override;

 private:
  void step_fv(Ensemble& state, const Ensemble& law, double dt,
               const StepNoise& noise, const ExecPolicy& exec) const;
  void step_martingale(Ensemble& state, const Ensemble& law, double dt,
                       const StepNoise& noise, const ExecPolicy& exec) const;

  BoltzmannSpec spec_;
  std::vector<double> cum_weight_;  // cumulative atom weights / nu(E)
};

}  // namespace ergo::models
