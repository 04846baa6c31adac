#pragma once

#include <cstdint>
#include <random>

namespace eigcollide {

/// Engine used for every random draw in the library.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent sub-seed for a named stream of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0xD1B54A32D192ED03ULL));
}

// Stream tags. Keep stable: changing them changes every reproduced matrix.
namespace stream {
inline constexpr std::uint64_t kBaseMatrix = 0;
inline constexpr std::uint64_t kRotatedAttempt = 0x1000;  // + attempt index
inline constexpr std::uint64_t kHaarRotation = 0x2000;
}  // namespace stream

inline Engine make_engine(std::uint64_t master, std::uint64_t stream_tag) {
  return Engine(derive_seed(master, stream_tag));
}

}  // namespace eigcollide
