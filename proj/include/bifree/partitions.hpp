#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace bifree {

/// Pairings are enumerated up to this many points (Catalan(8) = 1430).
inline constexpr int kMaxPairingPoints = 16;

/// Non-crossing partitions are enumerated up to this many points
/// (Catalan(12) = 208012).
inline constexpr int kMaxPartitionPoints = 12;

/// A perfect matching of {0, ..., p-1}; pairs are (a, b) with a < b, sorted by a.
struct NCPairing {
  std::vector<std::pair<int, int>> pairs;
  bool operator==(const NCPairing&) const = default;
};

/// Blocks sorted internally and by their smallest element.
using Partition = std::vector<std::vector<int>>;

std::uint64_t catalan(int k);

/// All non-crossing pairings of p points. Odd p and p > kMaxPairingPoints are
/// rejected.
std::vector<NCPairing> enumerate_nc_pairings(int p);

/// All perfect matchings of p points, crossing or not; (p-1)!! of them.
std::vector<NCPairing> enumerate_all_pairings(int p);

bool pairs_cross(std::pair<int, int> x, std::pair<int, int> y);
bool is_non_crossing(const NCPairing& pairing);
bool is_non_crossing(const Partition& partition);

/// All non-crossing partitions of {0, ..., p-1}, Catalan(p) of them. The
/// result for each p is computed once and shared.
const std::vector<Partition>& nc_partitions(int p);

}  // namespace bifree
