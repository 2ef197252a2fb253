#pragma once

#include <string>
#include <vector>

#include "ergo/model.hpp"

namespace ergo::models {

// Lipschitz perturbation g in bE(x) = -Kx + g(x).
struct Perturbation {
  enum class Kind { kZero, kTanh };
  Kind kind = Kind::kZero;
  double scale = 0.0;  // tanh: g_i(x) = scale * tanh(x_i), L_g = |scale|

  void eval(std::span<const double> x, std::span<double> out) const;
  double lipschitz() const { return kind == Kind::kZero ? 0.0 : std::abs(scale); }
};

// Interaction kernel bI(x, z) averaged over the position law.  Families are
// affine in z so the mean-field term reduces to the law's position mean.
struct Interaction {
  enum class Kind { kZero, kAttraction };
  Kind kind = Kind::kZero;
  double coeff = 0.0;  // attraction: bI(x,z) = coeff * (z - x)

  void eval_mean(std::span<const double> x, std::span<const double> law_mean,
                 std::span<double> out) const;
};

struct KineticMVSpec {
  int dim = 1;             // position dimension d; the state is (x, y) in R^{2d}
  double u = 1.0;          // coupling strength
  double gamma_damp = 1.0; // velocity damping
  std::vector<double> K;   // d x d positive definite, row-major
  Perturbation g;
  Interaction interaction;

  static KineticMVSpec isotropic(int dim, double u, double gamma_damp, double kappa);
  double kappa_min() const;  // smallest eigenvalue for diagonal K
  bool contraction_condition() const {  // 2 L_g^2 u / gamma^2 < kappa
    const double lg = g.lipschitz();
    return 2.0 * lg * lg * u / (gamma_damp * gamma_damp) < kappa_min();
  }
};

// One-step kinetic Euler: x' = x + y (t-s) (pre-step velocity), then
// y' = y + (u bE(x) + u mean_z bI(x,z) - gamma y)(t-s) + sqrt(2 gamma u) dB.
class KineticMVModel final : public OneStepModel {
 public:
  explicit KineticMVModel(KineticMVSpec spec);

  int dim() const override { return 2 * spec_.dim; }
  bool mean_field() const override { return true; }
  std::string name() const override { return "kinetic_mv"; }
  const KineticMVSpec& spec() const { return spec_; }

  void step(Ensemble& state, const Ensemble& law, double s, double t,
            const StepNoise& noise, const ExecPolicy& exec) const override;

 private:
  KineticMVSpec spec_;
};

}  // namespace ergo::models
