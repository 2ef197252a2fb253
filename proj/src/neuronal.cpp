#include "ergo/models/neuronal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo::models {

NeuronalModel::NeuronalModel(NeuronalSpec spec) : spec_(spec) {
  if (!(spec_.rate_cap > 0.0)) throw std::invalid_argument("neuronal: rate cap M must be positive");
  if (spec_.coupling_j < 0.0) throw std::invalid_argument("neuronal: J must be nonnegative");
}

void NeuronalModel::step(Ensemble& state, const Ensemble& law, double s, double t,
                         const StepNoise& noise, const ExecPolicy& exec) const {
  const double dt = t - s;
  if (dt < 0.0 || dt > step_cap()) throw std::invalid_argument("neuronal: step exceeds cap");
  if (noise.is_coarsened()) {
    throw std::invalid_argument("neuronal: jump noise cannot be coarsened");
  }
  if (law.size() == 0 || law.dim() != 1) {
    throw std::invalid_argument("neuronal: missing law argument");
  }
  // Mean-field drive from the time-s law (uncapped rate f).
  double mean_f = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) mean_f += spec_.rate(law.point(i)[0]);
  mean_f /= double(law.size());

  const double cap = spec_.rate_cap;
  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double& xref = state.point(i)[0];
      if (xref < 0.0) throw std::runtime_error("neuronal: negative state");
      const double r = spec_.drift(xref) + spec_.coupling_j * mean_f;
      auto jumps = noise.stream(i, 2);
      double x = xref;
      double elapsed = 0.0;
      while (true) {
        const double wait = jumps.exponential(cap);
        if (elapsed + wait >= dt) {
          x += r * (dt - elapsed);
          break;
        }
        elapsed += wait;
        x += r * wait;  // state just before the proposed spike
        const double intensity = std::min(spec_.rate(x), cap);
        if (jumps.uniform() * cap <= intensity) {
          x = 0.0;  // spike: full reset, drift resumes at the frozen rate
        }
      }
      xref = x;
    }
  });
}

}  // namespace ergo::models
