#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ibnet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent sub-seed from a base seed and a list of tags
/// (stream id, timestep, ...). Pure function, so streams can be replayed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (auto t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

/// Stream tags used by the simulator.
enum class Stream : std::uint64_t {
  Network = 1,
  PairOrder = 2,
  FirmRequests = 3,
  Household = 4,
  Counterparty = 5,
  Ties = 6,
};

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return derive_seed(seed, {static_cast<std::uint64_t>(s)});
}

}  // namespace ibnet
