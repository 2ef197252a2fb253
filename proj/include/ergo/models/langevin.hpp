#pragma once

#include <memory>
#include <span>
#include <string>

#include "ergo/model.hpp"

namespace ergo::models {

// Coordinate-wise drift fields used by the Langevin scheme and reused as
// Boltzmann drifts.
struct Drift {
  enum class Kind { kOu, kDoubleWell, kAffine };
  Kind kind = Kind::kOu;
  double a = 1.0;  // ou: rate k; double_well: tilt a; affine: slope
  double b = 0.0;  // affine: offset

  void eval(std::span<const double> x, std::span<double> out) const;
  // Declared Lipschitz constant (local bound on [-r,r] for the cubic well).
  double lipschitz(double radius = 10.0) const;
  // One-sided contraction rate: <x-y, b(x)-b(y)> <= -rate |x-y|^2, valid
  // globally for ou/affine and outside |x-y| >= weak_radius for the well.
  double contraction_rate() const;
  double weak_radius() const;

  static Drift ou(double rate) { return {Kind::kOu, rate, 0.0}; }
  static Drift double_well(double a) { return {Kind::kDoubleWell, a, 0.0}; }
  static Drift affine(double slope, double offset) { return {Kind::kAffine, slope, offset}; }
};

struct LangevinSpec {
  int dim = 1;
  Drift drift = Drift::ou(1.0);
  double amplitude = 1.0;  // identity diffusion scaled; 0 gives the ODE flow
};

// Euler step x -> x + b(x)(t-s) + amplitude * (B_t - B_s).
class LangevinModel final : public OneStepModel {
 public:
  explicit LangevinModel(LangevinSpec spec) : spec_(spec) {}

  int dim() const override { return spec_.dim; }
  std::string name() const override { return "langevin"; }
  const LangevinSpec& spec() const { return spec_; }

  void step(Ensemble& state, const Ensemble& law, double s, double t,
            const StepNoise& noise, const ExecPolicy& exec) const override;

 private:
  LangevinSpec spec_;
};

}  // namespace ergo::models
