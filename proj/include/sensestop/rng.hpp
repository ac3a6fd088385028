#ifndef SENSESTOP_RNG_HPP
#define SENSESTOP_RNG_HPP

#include <cstdint>

namespace sensestop {

/// SplitMix64 stream generator (Steele, Lea & Flood's splittable mix).
///
/// This is the simulator's fixed generator family: batch b of a run seeded
/// with s draws from the stream seeded by scramble(s + (b+1)*GOLDEN), where
/// scramble is the SplitMix64 output function. The avalanche step keeps batch
/// starting states far apart in the underlying Weyl sequence (a plain
/// XOR/offset would make consecutive batches shifted copies of one stream),
/// so per-batch streams derive from (seed, batch index) without coordination
/// and results are reproducible bit-for-bit for any worker schedule.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 for_batch(std::uint64_t seed, std::uint64_t batch) {
    return SplitMix64(scramble(seed + 0x9E3779B97F4A7C15ULL * (batch + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return scramble(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace sensestop

#endif  // SENSESTOP_RNG_HPP
