#pragma once

#include <cstdint>
#include <random>

namespace ngsim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for realization `index` of an ensemble keyed by `master`.
/// For a fixed master the map index -> seed is injective.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + index * 0x9e3779b97f4a7c15ULL);
}

/// Uniform integer in [0, bound). bound must be positive.
template <class Engine>
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

/// Uniform double in [0, 1) built from the top 53 bits.
template <class Engine>
inline double uniform_unit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ngsim
