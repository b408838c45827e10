#pragma once

#include <cstdint>
#include <random>

namespace polytight {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent, reproducible stream for replica `index` under `master`.
inline Rng make_stream(std::uint64_t master, std::uint64_t index,
                       std::uint64_t salt = 0) {
  return Rng(mix64(mix64(master ^ mix64(salt)) + index));
}

/// Uniform on [0, 1) with 53 random bits; independent of the standard
/// library's distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace polytight
