#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ergo {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// A block cipher on a 128-bit counter with a 64-bit key; every draw is a
// pure function of (key, counter), so streams can be indexed by
// (seed, step, particle, channel) and results do not depend on execution
// order or thread count.
struct PhiloxBlock {
  uint32_t v[4];
};

PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                       uint32_t k0, uint32_t k1);

// One logical random stream, keyed by (seed, step, particle, channel).
// Draws are sequenced by an internal block counter; a stream supports at
// most 2^24 blocks, far beyond any per-particle-per-step usage here.
class NoiseStream {
 public:
  NoiseStream() = default;
  NoiseStream(uint64_t seed, uint64_t step, uint64_t particle, uint32_t channel);

  // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
  double uniform();
  // Standard normal via Box-Muller; draws come in cached pairs.
  double gaussian();
  // Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  uint64_t next_bits64();

  uint32_t key_[2] = {0, 0};
  uint32_t ctr_[3] = {0, 0, 0};  // step lo/hi, particle
  uint32_t channel_ = 0;
  uint32_t draw_ = 0;            // block index within the stream
  PhiloxBlock block_{};          // current block cache
  int lanes_left_ = 0;           // 64-bit lanes remaining in block_
  double spare_gauss_ = 0.0;
  bool has_spare_ = false;
};

// Gaussian increments summed across a refinement of one step: the k-th
// gaussian() equals  sum_j sqrt(dt_j) g_{j,k} / sqrt(sum_j dt_j)  where
// g_{j,k} is the k-th gaussian of the j-th sub-stream.  This realizes the
// convention that a coarse Brownian increment is defined as the sum of the
// fine sub-increments.  Non-gaussian draws delegate to the first sub-stream
// so that auxiliary channels stay aligned with the finest resolution.
class CoarseNoiseStream {
 public:
  CoarseNoiseStream(std::vector<NoiseStream> subs, std::vector<double> dts);

  double uniform() { return subs_[0].uniform(); }
  double gaussian();
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::vector<NoiseStream> subs_;
  std::vector<double> sqrt_dt_;
  double inv_norm_ = 1.0;
};

// Per-step noise source handed to models: plain mode keys streams by
// (seed, step_index, particle, channel); coarsened mode aggregates the
// gaussians of several sub-step indices (see CoarseNoiseStream).
class StepNoise {
 public:
  StepNoise(uint64_t seed, uint64_t step_index)
      : seed_(seed), steps_{step_index} {}
  static StepNoise coarsened(uint64_t seed, std::vector<uint64_t> substep_indices,
                             std::vector<double> dts);

  bool is_coarsened() const { return !dts_.empty(); }
  NoiseStream stream(uint64_t particle, uint32_t channel) const;
  CoarseNoiseStream coarse_stream(uint64_t particle, uint32_t channel) const;
  // The variant models should use: plain or coarsened depending on mode.
  class ParticleNoise particle_stream(uint64_t particle, uint32_t channel) const;

 private:
  uint64_t seed_;
  std::vector<uint64_t> steps_;
  std::vector<double> dts_;  // empty in plain mode
};

// Model-facing wrapper: one particle's draws for one step, either plain
// or coarsened.  Kept concrete so the per-draw path has no virtual calls.
class ParticleNoise {
 public:
  explicit ParticleNoise(NoiseStream s) : plain_(s), coarse_(false) {}
  explicit ParticleNoise(CoarseNoiseStream s)
      : agg_(std::move(s)), coarse_(true) {}

  double uniform() { return coarse_ ? agg_.uniform() : plain_.uniform(); }
  double gaussian() { return coarse_ ? agg_.gaussian() : plain_.gaussian(); }
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  NoiseStream plain_{};
  CoarseNoiseStream agg_{{}, {}};
  bool coarse_;
};

}  // namespace ergo
