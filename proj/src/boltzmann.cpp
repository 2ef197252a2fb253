#include "ergo/models/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo::models {

void JumpAmplitude::eval(std::span<const double> v, double z, std::span<const double> x,
                         std::span<double> out) const {
  switch (kind) {
    case Kind::kTowardV:
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * z * (v[j] - x[j]);
      break;
    case Kind::kMarkTimesV:
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * z * v[j];
      break;
    case Kind::kMarkOnes:
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * z;
      break;
  }
}

void JumpAmplitude::mean_over_law(std::span<const double> law_mean, double z,
                                  std::span<const double> x, std::span<double> out) const {
  eval(law_mean, z, x, out);  // affine in v, so the mean passes through
}

double JumpAmplitude::c_bar(double z, int dim) const {
  const double base = std::abs(scale * z);
  return kind == Kind::kMarkOnes ? base * std::sqrt(double(dim)) : base;
}

double JumpRate::eval(std::span<const double> v, double /*z*/,
                      std::span<const double> x) const {
  if (kind == Kind::kConstant) return level;
  double d2 = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double d = v[j] - x[j];
    d2 += d * d;
  }
  return level / (1.0 + d2);
}

double BoltzmannSpec::nu_total() const {
  double acc = 0.0;
  for (const auto& a : atoms) acc += a.weight;
  return acc;
}

double BoltzmannSpec::q_constant() const {
  double acc = 0.0;
  for (const auto& a : atoms) acc += a.weight * amplitude.c_bar(a.z, dim);
  return acc;
}

BoltzmannModel::BoltzmannModel(BoltzmannSpec spec) : spec_(std::move(spec)) {
  if (spec_.atoms.empty()) throw std::invalid_argument("boltzmann: nu needs at least one atom");
  for (const auto& a : spec_.atoms) {
    if (!(a.weight > 0.0)) throw std::invalid_argument("boltzmann: atom weights must be positive");
  }
  if (spec_.regime == BoltzmannRegime::kFiniteVariation && !(spec_.rate_cap > 0.0)) {
    throw std::invalid_argument("boltzmann: finite-variation regime needs gamma_max > 0");
  }
  const double total = spec_.nu_total();
  double running = 0.0;
  for (const auto& a : spec_.atoms) {
    running += a.weight;
    cum_weight_.push_back(running / total);
  }
  cum_weight_.back() = 1.0;
}

void BoltzmannModel::step(Ensemble& state, const Ensemble& law, double s, double t,
                          const StepNoise& noise, const ExecPolicy& exec) const {
  const double dt = t - s;
  if (dt < 0.0 || dt > step_cap()) throw std::invalid_argument("boltzmann: step exceeds cap");
  if (noise.is_coarsened()) {
    throw std::invalid_argument("boltzmann: jump noise cannot be coarsened");
  }
  if (law.size() == 0 || law.dim() != spec_.dim) {
    throw std::invalid_argument("boltzmann: missing or mismatched law argument");
  }
  if (spec_.regime == BoltzmannRegime::kFiniteVariation) {
    step_fv(state, law, dt, noise, exec);
  } else {
    step_martingale(state, law, dt, noise, exec);
  }
}

void BoltzmannModel::step_fv(Ensemble& state, const Ensemble& law, double dt,
                             const StepNoise& noise, const ExecPolicy& exec) const {
  const int d = spec_.dim;
  const double candidate_rate = spec_.nu_total() * spec_.rate_cap;
  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x0(d), xr(d), drift(d), path(d), incr(d);
    for (std::size_t i = lo; i < hi; ++i) {
      auto pt = state.point(i);
      std::copy(pt.begin(), pt.end(), x0.begin());
      std::copy(pt.begin(), pt.end(), xr.begin());
      spec_.drift.eval(x0, drift);
      auto stream = noise.stream(i, 2);
      double elapsed = 0.0;
      while (true) {
        elapsed += stream.exponential(candidate_rate);
        if (elapsed >= dt) break;
        const std::size_t atom =
            std::lower_bound(cum_weight_.begin(), cum_weight_.end(), stream.uniform()) -
            cum_weight_.begin();
        const double z = spec_.atoms[std::min(atom, spec_.atoms.size() - 1)].z;
        const auto v_idx =
            std::min(std::size_t(stream.uniform() * double(law.size())), law.size() - 1);
        const auto v = law.point(v_idx);
        // "Current" state for the coefficient: frozen at x0 by default; the
        // running-state mode tracks the in-step path x0 + drift*u + jumps.
        std::span<const double> xc(x0);
        if (spec_.running_state_amplitude) {
          for (int j = 0; j < d; ++j) path[j] = xr[j] + drift[j] * elapsed;
          xc = std::span<const double>(path.data(), std::size_t(d));
        }
        const double rate = spec_.rate.eval(v, z, xc);
        if (rate > spec_.rate_cap * (1.0 + 1e-12)) {
          throw std::runtime_error("boltzmann: observed rate exceeds declared gamma_max");
        }
        if (stream.uniform() * spec_.rate_cap <= rate) {
          spec_.amplitude.eval(v, z, xc, incr);
          for (int j = 0; j < d; ++j) xr[j] += incr[j];
        }
      }
      for (int j = 0; j < d; ++j) {
        pt[j] = xr[j] + drift[j] * dt;
        if (!std::isfinite(pt[j])) throw std::runtime_error("boltzmann: non-finite state");
      }
    }
  });
}

void BoltzmannModel::step_martingale(Ensemble& state, const Ensemble& law, double dt,
                                     const StepNoise& noise, const ExecPolicy& exec) const {
  const int d = spec_.dim;
  const double total_rate = spec_.nu_total();
  std::vector<double> law_mean(d, 0.0);
  for (std::size_t i = 0; i < law.size(); ++i) {
    auto v = law.point(i);
    for (int j = 0; j < d; ++j) law_mean[j] += v[j];
  }
  for (int j = 0; j < d; ++j) law_mean[j] /= double(law.size());

  parallel_for(state.size(), exec, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x0(d), drift(d), incr(d), comp(d), acc(d);
    for (std::size_t i = lo; i < hi; ++i) {
      auto pt = state.point(i);
      std::copy(pt.begin(), pt.end(), x0.begin());
      spec_.drift.eval(x0, drift);
      std::fill(acc.begin(), acc.end(), 0.0);
      auto stream = noise.stream(i, 2);
      double elapsed = 0.0;
      while (true) {
        elapsed += stream.exponential(total_rate);
        if (elapsed >= dt) break;
        const std::size_t atom =
            std::lower_bound(cum_weight_.begin(), cum_weight_.end(), stream.uniform()) -
            cum_weight_.begin();
        const double z = spec_.atoms[std::min(atom, spec_.atoms.size() - 1)].z;
        const auto v_idx =
            std::min(std::size_t(stream.uniform() * double(law.size())), law.size() - 1);
        spec_.amplitude.eval(law.point(v_idx), z, x0, incr);
        for (int j = 0; j < d; ++j) acc[j] += incr[j];
      }
      // Exact compensator over the atomic nu and the law snapshot.
      for (const auto& a : spec_.atoms) {
        spec_.amplitude.mean_over_law(law_mean, a.z, x0, comp);
        for (int j = 0; j < d; ++j) acc[j] -= dt * a.weight * comp[j];
      }
      for (int j = 0; j < d; ++j) {
        pt[j] = x0[j] + drift[j] * dt + acc[j];
        if (!std::isfinite(pt[j])) throw std::runtime_error("boltzmann: non-finite compensator");
      }
    }
  });
}

}  // namespace ergo::models
