#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace stakesim {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`. Depends only on the pair, so
/// trial results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index ^ 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with the sampling primitives the miners need. Sampling is done
/// by inversion here rather than through <random> distributions, whose output
/// differs between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  /// Number of trials up to and including the first success, each trial
  /// succeeding with probability r (support 1, 2, ...). r >= 1 returns 1.
  std::uint64_t geometric(double r);

  /// Same as geometric() but parameterised by log(1 - r) <= 0.
  std::uint64_t geometric_from_log_failure(double log_failure);

 private:
  std::mt19937_64 engine_;
};

}  // namespace stakesim
