#pragma once

#include <cstdint>
#include <random>

namespace levyfield {

// Substream tags. Every random draw of the toolkit comes from a generator
// seeded by substream_seed(master, tag, band, replica).
enum class StreamTag : std::uint64_t { Jump = 1, Gaussian = 2, CharFunction = 3 };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, StreamTag tag, std::uint64_t band, std::uint64_t replica) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  h = splitmix64(h ^ band);
  return splitmix64(h ^ replica);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, StreamTag tag, std::uint64_t band = 0, std::uint64_t replica = 0) {
  return Rng(substream_seed(master, tag, band, replica));
}

// Uniform on [0,1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace levyfield
