#pragma once

#include <cmath>
#include <cstdint>

namespace phasepos {

// Counter-based splittable random streams. Every (master seed, drop, node,
// purpose) tuple maps to an independent stream, so drops and UEs can be
// processed in any order, or in parallel, without changing a single draw.
// The generator core is SplitMix64 and all distributions are sampled
// explicitly, which keeps campaign output independent of the standard
// library's distribution implementations.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Purpose tag separating the random streams consumed by one (drop, node).
enum class Stream : std::uint64_t {
  Layout = 1,
  TargetMeasurement = 2,
  ReferenceMeasurement = 3,
  TargetAmbiguity = 4,
  ReferenceAmbiguity = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t drop,
                                 std::uint64_t node, Stream purpose) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ mix64(drop));
  h = mix64(h ^ mix64(node));
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller; the second variate is discarded so a
  /// call always consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  double exponential(double mean) { return -mean * std::log(1.0 - uniform01()); }

  /// Unbiased uniform integer on [0, n), rejection sampled.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0ull - n) % n;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(bounded(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace phasepos
