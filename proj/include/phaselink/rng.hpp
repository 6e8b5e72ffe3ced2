#pragma once

#include <cstdint>

namespace phaselink {

/// SplitMix64 finalizer. Bijective 64-bit mixing function.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Counter-based deterministic random stream (SplitMix64).
///
/// Substreams are derived by keyed mixing of (master seed, stream index),
/// never by splitting a shared sequential stream. Two streams with the
/// same key produce identical sequences on every platform, which is what
/// makes Monte Carlo runs reproducible under any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed + kGamma)) {}

  /// Substream keyed by (master, stream). Pure function of its inputs.
  static Rng keyed(std::uint64_t master, std::uint64_t stream) {
    return Rng(mix64(master + kGamma) ^ mix64(stream * kGamma + 0x94D049BB133111EBULL));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform angle in [0, 2*pi).
  double uniform_angle() { return uniform() * 6.283185307179586476925286766559; }

  /// Fair coin, +1 or -1.
  int coin() { return (next_u64() >> 63) ? 1 : -1; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // 64-bit multiply-shift; bias is < 2^-64 * n, irrelevant at our scales.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
};

}  // namespace phaselink
