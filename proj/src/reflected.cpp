#include "ergo/models/reflected.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo::models {

void ReflectedModel::step(Ensemble& state, const Ensemble& /*law*/, double s, double t,
                          const StepNoise& noise, const ExecPolicy& exec) const {
  const double dt = t - s;
  if (dt < 0.0 || dt > step_cap()) throw std::invalid_argument("reflected: step exceeds cap");
  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double& x = state.point(i)[0];
      if (x < 0.0) throw std::runtime_error("reflected: negative input state");
      const double sig = spec_.sigma(x);
      auto g = noise.particle_stream(i, 0);
      const double incr = spec_.drift(x) * dt + sig * std::sqrt(dt) * g.gaussian();
      if (spec_.flavor == ReflectedFlavor::kProjected || sig == 0.0) {
        // sigma(x) = 0 degenerates the bridge minimum to min(0, D); the
        // projected map is then the exact deterministic reflection.
        x = std::max(0.0, x + incr);
        continue;
      }
      auto aux = noise.particle_stream(i, 1);
      const double u = aux.uniform();
      const double disc = incr * incr - 2.0 * sig * sig * dt * std::log(u);
      const double path_min = 0.5 * (incr - std::sqrt(disc));
      // max(0, .) guards the nonnegativity invariant against rounding when
      // the reflection correction nearly cancels x + incr.
      x = std::max(0.0, x + incr + std::max(0.0, -(x + path_min)));
    }
  });
}

}  // namespace ergo::models
