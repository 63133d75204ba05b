#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace semchain {

// Samplers used by all synthetic-data generation. The standard library
// distributions have implementation-defined output sequences, so everything
// that must reproduce bit-for-bit draws through these instead.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Order-sensitive combine of seed components into one engine seed, so that
// e.g. (seed, dict_size, k, trial) streams never collide or alias when a
// component changes.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8C7F0AAC97C4AA2Full;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Uniform draw from [0, n). Rejection sampling keeps it exactly uniform.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t span = (~std::uint64_t{0} / n) * n;
  std::uint64_t v = rng();
  while (v >= span) v = rng();
  return v % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (one branch per call; the discarded sine
// branch keeps the draw stateless).
inline double gaussian(std::mt19937_64& rng) {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) *
         std::cos(6.28318530717958647692528676655900577 * v);
}

}  // namespace semchain
