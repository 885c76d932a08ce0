#pragma once

#include <cstdint>
#include <random>

namespace mlo {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed reported for one deployment; a pure function of (base_seed, index).
inline constexpr std::uint64_t deployment_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base_seed) ^ (index + 0x632be59bd9b4e019ULL));
}

/// Independent streams of one deployment.
enum class Stream : std::uint64_t { Geometry = 1, Traffic = 2, Toggles = 3 };

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t index, Stream stream) {
  const std::uint64_t s = deployment_seed(base_seed, index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace mlo
