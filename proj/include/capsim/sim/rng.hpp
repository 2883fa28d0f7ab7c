#pragma once

#include <cmath>
#include <cstdint>

namespace capsim::sim {

/// Deterministic PRNG (xorshift128+ seeded through splitmix64) with a
/// Box-Muller normal on top. Self-contained on purpose: trace bytes must not
/// depend on the standard library's <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    s0_ = seed ? seed : 0x9e3779b97f4a7c15ull;
    s1_ = splitmix(s0_);
    s0_ = splitmix(s1_);
  }

  std::uint64_t next_u64() {
    std::uint64_t x = s0_;
    const std::uint64_t y = s1_;
    s0_ = y;
    x ^= x << 23;
    s1_ = x ^ y ^ (x >> 17) ^ (y >> 26);
    return s1_ + y;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    const double u = (next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Standard normal.
  double gaussian() {
    const double u1 = std::max(uniform(0.0, 1.0), 1e-300);
    const double u2 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t s0_, s1_;
};

}  // namespace capsim::sim
