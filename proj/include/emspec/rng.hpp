// Counter-addressable random stream, version "sm64/1".
//
// The n-th draw is a pure function of (seed, n): the n-th output of a
// splitmix64 generator, bits(n) = mix64(seed + (n+1)*GAMMA). Draws can be
// sampled out of order and partitioned across threads with bit-identical
// results, and the mapping is fixed by this file so fixtures reproduce
// across implementations. Child streams (one per map row, per survey
// member, ...) come from derive_seed.
//
// Integer outputs are exact everywhere; the Gaussian transform goes through
// libm (log/cos/sin) and is reproducible per platform.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace emspec {

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t n) const { return mix64(seed_ + (n + 1) * kRngGamma); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform(std::uint64_t n) const {
    return static_cast<double>(bits(n) >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(std::uint64_t n, double lo, double hi) const {
    return lo + (hi - lo) * uniform(n);
  }

  // Standard normal pair via Box-Muller; consumes counters 2n and 2n+1.
  std::complex<double> normal_pair(std::uint64_t n) const {
    const double u1 = (static_cast<double>(bits(2 * n) >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform(2 * n + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  // Independent child stream for sub-task k.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(mix64(seed) ^ mix64(k + 0x517CC1B727220A95ull));
  }

 private:
  std::uint64_t seed_;
};

}  // namespace emspec
