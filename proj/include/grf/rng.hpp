#pragma once

#include <cstdint>
#include <random>

namespace grf {

// Per-stream generator. Streams are derived from a master seed with
// derive_seed(); tree t of a forest draws from derive_seed(master, t).
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Named top-level streams so pipeline stages never share a generator.
namespace stream {
inline constexpr std::uint64_t kGuide = 0x6775696465ULL;     // "guide"
inline constexpr std::uint64_t kSelector = 0x73656c6563ULL;  // "selec"
inline constexpr std::uint64_t kFinal = 0x66696e616cULL;     // "final"
inline constexpr std::uint64_t kSplit = 0x73706c6974ULL;     // "split"
inline constexpr std::uint64_t kReplicate = 0x7265706cULL;   // "repl"
}  // namespace stream

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, n) from the raw 64-bit output (Lemire's method), so
// draws do not depend on the standard library's distribution implementation.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace grf
