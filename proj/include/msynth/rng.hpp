#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace msynth {

using Rng = std::mt19937_64;

/// splitmix64 mix step; used to derive independent stream seeds from a base
/// seed plus an index without correlations between neighboring indices.
inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng makeRng(std::uint64_t seed) { return Rng(seed); }

inline Rng makeStream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mixSeed(seed, index));
}

/// Uniform in [0, 1). Implemented directly from engine bits so the value
/// sequence does not depend on the standard library's distribution internals.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [lo, hi] via rejection-free modulo of a 64-bit draw.
/// Bias is negligible for the small ranges used here.
inline std::int64_t uniformInt(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng() % span);
}

/// Standard normal via Box-Muller. Stateless on purpose: the second draw of
/// the pair is discarded so resumed streams reproduce exactly.
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline std::string serializeRng(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline Rng deserializeRng(const std::string& state) {
  Rng rng;
  std::istringstream is(state);
  is >> rng;
  return rng;
}

}  // namespace msynth
