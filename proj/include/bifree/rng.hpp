#pragma once

#include <cstdint>
#include <random>

namespace bifree {

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `root`. A pure function of (root, index):
/// stream identity never depends on how streams are scheduled.
constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Child seed for a named sub-purpose (e.g. "orbital" vs "volume") of a seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return stream_seed(seed ^ 0xd1b54a32d192ed03ULL, tag);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace bifree
