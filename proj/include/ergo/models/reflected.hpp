#pragma once

#include <string>

#include "ergo/model.hpp"

namespace ergo::models {

enum class ReflectedFlavor { kProjected, kExactSkorokhod };

// Scalar affine coefficient a0 + a1 * x.
struct AffineCoeff {
  double a0 = 0.0;
  double a1 = 0.0;
  double operator()(double x) const { return a0 + a1 * x; }
};

struct ReflectedSpec {
  AffineCoeff drift;                 // contraction needs drift.a1 < 0
  AffineCoeff sigma;                 // nonnegative on R+ when a0, a1 >= 0
  ReflectedFlavor flavor = ReflectedFlavor::kExactSkorokhod;

  double c_b() const { return drift.a1 * drift.a1; }     // squared Lipschitz
  double c_sigma() const { return sigma.a1 * sigma.a1; } // squared Lipschitz
  double b_bar() const { return -drift.a1; }
  bool theorem_regime() const { return 2.0 * b_bar() > c_sigma(); }
};

// One-dimensional reflected dynamics on R+.  Projected flavor applies the
// Euler map and clips at 0.  The exact flavor samples the endpoint law of
// the frozen-coefficient reflected process: with D = b(x)dt + sigma(x) dW
// and conditional path minimum m = (D - sqrt(D^2 - 2 sigma(x)^2 dt ln U))/2,
// the step is x -> x + D + max(0, -(x + m)).
class ReflectedModel final : public OneStepModel {
 public:
  explicit ReflectedModel(ReflectedSpec spec) : spec_(spec) {}

  int dim() const override { return 1; }
  Constraint constraint() const override { return Constraint::kNonnegativeOrthant; }
  std::string name() const override { return "reflected"; }
  const ReflectedSpec& spec() const { return spec_; }

  void step(Ensemble& state, const Ensemble& law, double s, double t,
            const StepNoise& noise, const ExecPolicy& exec) const override;

 private:
  ReflectedSpec spec_;
};

}  // namespace ergo::models
