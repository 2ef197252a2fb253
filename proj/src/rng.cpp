#include "ergo/rng.hpp"

#include <numeric>

namespace ergo {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(uint32_t c[4], uint32_t k0, uint32_t k1) {
  const uint64_t p0 = uint64_t(kMul0) * c[0];
  const uint64_t p1 = uint64_t(kMul1) * c[2];
  const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  const uint32_t n0 = hi1 ^ c[1] ^ k0;
  const uint32_t n1 = lo1;
  const uint32_t n2 = hi0 ^ c[3] ^ k1;
  const uint32_t n3 = lo0;
  c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                       uint32_t k0, uint32_t k1) {
  uint32_t c[4] = {c0, c1, c2, c3};
  for (int r = 0; r < 10; ++r) {
    if (r > 0) { k0 += kWeyl0; k1 += kWeyl1; }
    round_once(c, k0, k1);
  }
  return PhiloxBlock{{c[0], c[1], c[2], c[3]}};
}

NoiseStream::NoiseStream(uint64_t seed, uint64_t step, uint64_t particle,
                         uint32_t channel) {
  key_[0] = uint32_t(seed);
  key_[1] = uint32_t(seed >> 32);
  ctr_[0] = uint32_t(step);
  ctr_[1] = uint32_t(step >> 32);
  if (particle > 0xFFFFFFFFull) throw std::invalid_argument("particle index exceeds 2^32");
  ctr_[2] = uint32_t(particle);
  if (channel > 0xFFu) throw std::invalid_argument("channel exceeds 255");
  channel_ = channel;
}

uint64_t NoiseStream::next_bits64() {
  if (lanes_left_ == 0) {
    if (draw_ >= (1u << 24)) throw std::runtime_error("noise stream exhausted");
    block_ = philox4x32(ctr_[0], ctr_[1], ctr_[2], (channel_ << 24) | draw_,
                        key_[0], key_[1]);
    ++draw_;
    lanes_left_ = 2;
  }
  --lanes_left_;
  const int base = lanes_left_ ? 0 : 2;
  return (uint64_t(block_.v[base]) << 32) | block_.v[base + 1];
}

double NoiseStream::uniform() {
  // (k + 0.5) * 2^-53 on k in [0, 2^53): open interval, symmetric.
  return (double(next_bits64() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_gauss_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_gauss_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

CoarseNoiseStream::CoarseNoiseStream(std::vector<NoiseStream> subs,
                                     std::vector<double> dts)
    : subs_(std::move(subs)) {
  sqrt_dt_.reserve(dts.size());
  double total = 0.0;
  for (double dt : dts) {
    sqrt_dt_.push_back(std::sqrt(dt));
    total += dt;
  }
  inv_norm_ = total > 0.0 ? 1.0 / std::sqrt(total) : 1.0;
}

double CoarseNoiseStream::gaussian() {
  double acc = 0.0;
  for (std::size_t j = 0; j < subs_.size(); ++j) {
    acc += sqrt_dt_[j] * subs_[j].gaussian();
  }
  return acc * inv_norm_;
}

StepNoise StepNoise::coarsened(uint64_t seed, std::vector<uint64_t> substep_indices,
                               std::vector<double> dts) {
  if (substep_indices.empty() || substep_indices.size() != dts.size()) {
    throw std::invalid_argument("coarsened noise needs matching substeps and dts");
  }
  StepNoise n(seed, substep_indices[0]);
  n.steps_ = std::move(substep_indices);
  n.dts_ = std::move(dts);
  return n;
}

NoiseStream StepNoise::stream(uint64_t particle, uint32_t channel) const {
  return NoiseStream(seed_, steps_[0], particle, channel);
}

CoarseNoiseStream StepNoise::coarse_stream(uint64_t particle, uint32_t channel) const {
  std::vector<NoiseStream> subs;
  subs.reserve(steps_.size());
  for (uint64_t s : steps_) subs.emplace_back(seed_, s, particle, channel);
  return CoarseNoiseStream(std::move(subs), dts_);
}

ParticleNoise StepNoise::particle_stream(uint64_t particle, uint32_t channel) const {
  if (is_coarsened()) return ParticleNoise(coarse_stream(particle, channel));
  return ParticleNoise(stream(particle, channel));
}

}  // namespace ergo
