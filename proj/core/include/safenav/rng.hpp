#pragma once

#include <cmath>
#include <cstdint>

namespace safenav {

/// Deterministic 64-bit stream; identical across platforms and independent
/// of the standard library's distribution implementations.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; u1 kept away from zero
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Independent child stream, decorrelated from sequential draws.
  SplitMix64 fork(std::uint64_t salt) {
    SplitMix64 child(state ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    child.next();
    return child;
  }
};

}  // namespace safenav
