#include "ergo/models/kinetic.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo::models {

void Perturbation::eval(std::span<const double> x, std::span<double> out) const {
  switch (kind) {
    case Kind::kZero:
      for (auto& v : out) v = 0.0;
      break;
    case Kind::kTanh:
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = scale * std::tanh(x[j]);
      break;
  }
}

void Interaction::eval_mean(std::span<const double> x, std::span<const double> law_mean,
                            std::span<double> out) const {
  switch (kind) {
    case Kind::kZero:
      for (auto& v : out) v = 0.0;
      break;
    case Kind::kAttraction:
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = coeff * (law_mean[j] - x[j]);
      break;
  }
}

KineticMVSpec KineticMVSpec::isotropic(int dim, double u, double gamma_damp, double kappa) {
  KineticMVSpec s;
  s.dim = dim;
  s.u = u;
  s.gamma_damp = gamma_damp;
  s.K.assign(std::size_t(dim) * dim, 0.0);
  for (int j = 0; j < dim; ++j) s.K[std::size_t(j) * dim + j] = kappa;
  return s;
}

double KineticMVSpec::kappa_min() const {
  // Diagonal entries as a proxy; specs built here are diagonal.
  double kmin = K.empty() ? 0.0 : K[0];
  for (int j = 0; j < dim; ++j) kmin = std::min(kmin, K[std::size_t(j) * dim + j]);
  return kmin;
}

KineticMVModel::KineticMVModel(KineticMVSpec spec) : spec_(std::move(spec)) {
  if (spec_.dim < 1) throw std::invalid_argument("kinetic: dim must be positive");
  if (spec_.K.size() != std::size_t(spec_.dim) * spec_.dim) {
    throw std::invalid_argument("kinetic: K must be dim x dim");
  }
  if (!(spec_.u > 0.0) || !(spec_.gamma_damp > 0.0)) {
    throw std::invalid_argument("kinetic: u and gamma_damp must be positive");
  }
}

void KineticMVModel::step(Ensemble& state, const Ensemble& law, double s, double t,
                          const StepNoise& noise, const ExecPolicy& exec) const {
  const double dt = t - s;
  if (dt < 0.0 || dt > step_cap()) throw std::invalid_argument("kinetic: step exceeds cap");
  if (law.size() == 0 || law.dim() != dim()) {
    throw std::invalid_argument("kinetic: missing or mismatched law argument");
  }
  const int d = spec_.dim;
  // Position mean of the law snapshot (the interaction families are affine
  // in z, so this is the whole mean-field summary).
  std::vector<double> law_mean(d, 0.0);
  for (std::size_t i = 0; i < law.size(); ++i) {
    auto z = law.point(i);
    for (int j = 0; j < d; ++j) law_mean[j] += z[j];
  }
  for (int j = 0; j < d; ++j) law_mean[j] /= double(law.size());

  const double sigma = std::sqrt(2.0 * spec_.gamma_damp * spec_.u) * std::sqrt(dt);
  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> ext(d), pert(d), inter(d);
    for (std::size_t i = lo; i < hi; ++i) {
      auto pt = state.point(i);
      auto x = pt.subspan(0, d);
      auto y = pt.subspan(d, d);
      // bE(x) = -Kx + g(x)
      for (int r = 0; r < d; ++r) {
        double acc = 0.0;
        for (int c = 0; c < d; ++c) acc += spec_.K[std::size_t(r) * d + c] * x[c];
        ext[r] = -acc;
      }
      spec_.g.eval(x, pert);
      spec_.interaction.eval_mean(x, law_mean, inter);
      auto g = noise.particle_stream(i, 0);
      for (int j = 0; j < d; ++j) {
        const double vel = y[j];
        const double force =
            spec_.u * (ext[j] + pert[j] + inter[j]) - spec_.gamma_damp * vel;
        x[j] += vel * dt;  // position uses the pre-step velocity
        y[j] = vel + force * dt + sigma * g.gaussian();
      }
    }
  });
}

}  // namespace ergo::models
