// SPDX-License-Identifier: Apache-2.0
#pragma once

// Portable deterministic random helpers. The standard distributions are
// implementation-defined, so anything that must replay bit-identically
// across toolchains goes through these instead.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace faultfs {

/// SplitMix64 finalizer; good for deriving independent seeds from ids.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

/// Unbiased integer in [0, bound). bound must be >= 1.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps it exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (one value per call, the pair is discarded).
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace faultfs
