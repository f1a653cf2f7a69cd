#pragma once

// oamtherm-rng-v1: counter-free splitmix64 stream with tagged substream
// derivation. All simulation randomness in the library flows through this
// generator so that outputs are reproducible across platforms and compilers
// (std::normal_distribution and friends are implementation-defined and
// therefore avoided).

#include <cmath>
#include <cstdint>
#include <numbers>

namespace oamtherm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // One warm-up mix so that nearby seeds decorrelate.
    (void)splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate via Box-Muller. Two uniforms per draw; the
  /// second branch is discarded to keep the stream position independent of
  /// call history.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t state_;
};

/// Derives an independent substream seed from a master seed and a tag.
/// Adding new tagged substreams never perturbs existing ones.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t t = tag;
  std::uint64_t mixed_tag = splitmix64(t);
  std::uint64_t s = seed ^ mixed_tag;
  return splitmix64(s);
}

}  // namespace oamtherm
