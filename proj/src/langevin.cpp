#include "ergo/models/langevin.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo::models {

void Drift::eval(std::span<const double> x, std::span<double> out) const {
  switch (kind) {
    case Kind::kOu:
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = -a * x[j];
      break;
    case Kind::kDoubleWell:
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = -x[j] * x[j] * x[j] + a * x[j];
      break;
    case Kind::kAffine:
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = a * x[j] + b;
      break;
  }
}

double Drift::lipschitz(double radius) const {
  switch (kind) {
    case Kind::kOu: return a;
    case Kind::kDoubleWell: return 3.0 * radius * radius + a;
    case Kind::kAffine: return std::abs(a);
  }
  return 0.0;
}

double Drift::contraction_rate() const {
  switch (kind) {
    case Kind::kOu: return a;
    case Kind::kDoubleWell: return a;  // holds outside weak_radius()
    case Kind::kAffine: return -a;
  }
  return 0.0;
}

double Drift::weak_radius() const {
  // For the cubic well, <x-y, b(x)-b(y)> <= (a - |x-y|^2/4)|x-y|^2
  // coordinate-wise, so contraction at rate a holds once |x-y|^2 >= 8a.
  if (kind == Kind::kDoubleWell) return 2.0 * std::sqrt(2.0 * std::max(0.0, a));
  return 0.0;
}

void LangevinModel::step(Ensemble& state, const Ensemble& /*law*/, double s, double t,
                         const StepNoise& noise, const ExecPolicy& exec) const {
  const double dt = t - s;
  if (dt < 0.0 || dt > step_cap()) throw std::invalid_argument("langevin: step exceeds cap");
  const double sq = spec_.amplitude * std::sqrt(dt);
  const int d = spec_.dim;
  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> drift(d);
    for (std::size_t i = lo; i < hi; ++i) {
      auto x = state.point(i);
      spec_.drift.eval(x, drift);
      if (sq != 0.0) {
        auto g = noise.particle_stream(i, 0);
        for (int j = 0; j < d; ++j) x[j] += drift[j] * dt + sq * g.gaussian();
      } else {
        for (int j = 0; j < d; ++j) x[j] += drift[j] * dt;
      }
    }
  });
}

}  // namespace ergo::models
