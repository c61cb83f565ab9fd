#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace mpucb {

// Engine used for graph generation, instance construction and test data.
using Rng = std::mt19937_64;

// SplitMix64 mixing step; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hashes an ordered list of keys into one 64-bit seed.
template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Keys... keys) noexcept {
  std::uint64_t h = mix64(seed);
  ((h = mix64(h ^ static_cast<std::uint64_t>(keys))), ...);
  return h;
}

// Small counter-style generator for per-pull reward substreams. Satisfies
// UniformRandomBitGenerator so it also plugs into <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Uniform double in the open interval (0, 1), built from the top 53 bits.
template <typename Engine>
double uniform_open01(Engine& eng) {
  for (;;) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

// Standard normal via Box-Muller (one value per call, no caching so that
// draws stay a pure function of the engine state).
template <typename Engine>
double standard_normal(Engine& eng) {
  const double u1 = uniform_open01(eng);
  const double u2 = uniform_open01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mpucb
