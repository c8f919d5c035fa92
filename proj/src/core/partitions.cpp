#include "bifree/partitions.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "bifree/errors.hpp"

namespace bifree {
namespace {

// Point 0 pairs with an odd offset 2k+1; inside and outside recurse.
void nc_pairings_of(int begin, int end, std::vector<std::pair<int, int>>& current,
                    std::vector<NCPairing>& out) {
  if (begin >= end) {
    NCPairing p{current};
    std::sort(p.pairs.begin(), p.pairs.end());
    out.push_back(std::move(p));
    return;
  }
  for (int partner = begin + 1; partner < end; partner += 2) {
    current.emplace_back(begin, partner);
    // Inner range is completed before the outer one by chaining through a
    // temporary list.
    std::vector<NCPairing> inner;
    std::vector<std::pair<int, int>> scratch;
    nc_pairings_of(begin + 1, partner, scratch, inner);
    for (const auto& in : inner) {
      const std::size_t mark = current.size();
      current.insert(current.end(), in.pairs.begin(), in.pairs.end());
      nc_pairings_of(partner + 1, end, current, out);
      current.resize(mark);
    }
    current.pop_back();
  }
}

void all_pairings_of(std::vector<int>& free_points, std::vector<std::pair<int, int>>& current,
                     std::vector<NCPairing>& out) {
  if (free_points.empty()) {
    NCPairing p{current};
    std::sort(p.pairs.begin(), p.pairs.end());
    out.push_back(std::move(p));
    return;
  }
  const int first = free_points.front();
  for (std::size_t k = 1; k < free_points.size(); ++k) {
    const int partner = free_points[k];
    std::vector<int> rest;
    for (std::size_t r = 1; r < free_points.size(); ++r) {
      if (r != k) rest.push_back(free_points[r]);
    }
    current.emplace_back(first, partner);
    all_pairings_of(rest, current, out);
    current.pop_back();
  }
}

void check_pairing_size(int p) {
  require(p >= 2 && p % 2 == 0, "pairings need an even, positive number of points");
  if (p > kMaxPairingPoints) {
    throw InvalidArgument("pairings are capped at " + std::to_string(kMaxPairingPoints) + " points, got " +
                          std::to_string(p));
  }
}

// Partitions of {begin, ..., end-1}: the block holding `begin` is any subset
// containing it, and the gaps it leaves are partitioned independently.
std::vector<Partition> partitions_of(int begin, int end) {
  if (begin >= end) return {Partition{}};
  std::vector<Partition> out;
  const int rest = end - begin - 1;
  for (std::uint32_t mask = 0; mask < (1u << rest); ++mask) {
    std::vector<int> block{begin};
    for (int k = 0; k < rest; ++k) {
      if (mask & (1u << k)) block.push_back(begin + 1 + k);
    }
    std::vector<Partition> acc{Partition{block}};
    for (std::size_t g = 0; g < block.size(); ++g) {
      const int lo = block[g] + 1;
      const int hi = g + 1 < block.size() ? block[g + 1] : end;
      if (lo >= hi) continue;
      const auto gap = partitions_of(lo, hi);
      std::vector<Partition> next;
      next.reserve(acc.size() * gap.size());
      for (const auto& a : acc) {
        for (const auto& b : gap) {
          Partition merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          next.push_back(std::move(merged));
        }
      }
      acc = std::move(next);
    }
    for (auto& a : acc) {
      std::sort(a.begin(), a.end());
      out.push_back(std::move(a));
    }
  }
  return out;
}

}  // namespace

std::uint64_t catalan(int k) {
  require(k >= 0 && k <= 33, "catalan index out of range");
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * static_cast<std::uint64_t>(i) + 1) / (static_cast<std::uint64_t>(i) + 2);
  return c;
}

std::vector<NCPairing> enumerate_nc_pairings(int p) {
  check_pairing_size(p);
  std::vector<NCPairing> out;
  std::vector<std::pair<int, int>> current;
  nc_pairings_of(0, p, current, out);
  return out;
}

std::vector<NCPairing> enumerate_all_pairings(int p) {
  check_pairing_size(p);
  std::vector<int> points(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) points[static_cast<std::size_t>(i)] = i;
  std::vector<NCPairing> out;
  std::vector<std::pair<int, int>> current;
  all_pairings_of(points, current, out);
  return out;
}

bool pairs_cross(std::pair<int, int> x, std::pair<int, int> y) {
  auto [a, b] = x;
  auto [c, d] = y;
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

bool is_non_crossing(const NCPairing& pairing) {
  for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairing.pairs.size(); ++j) {
      if (pairs_cross(pairing.pairs[i], pairing.pairs[j])) return false;
    }
  }
  return true;
}

bool is_non_crossing(const Partition& partition) {
  for (std::size_t u = 0; u < partition.size(); ++u) {
    for (std::size_t v = u + 1; v < partition.size(); ++v) {
      for (int a : partition[u]) {
        for (int b : partition[u]) {
          if (a >= b) continue;
          for (int c : partition[v]) {
            for (int d : partition[v]) {
              if (c < d && pairs_cross({a, b}, {c, d})) return false;
            }
          }
        }
      }
    }
  }
  return true;
}

const std::vector<Partition>& nc_partitions(int p) {
  require(p >= 1 && p <= kMaxPartitionPoints, "partition size out of range");
  static std::mutex mutex;
  static std::map<int, std::vector<Partition>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) {
    it = cache.emplace(p, partitions_of(0, p)).first;
  }
  return it->second;
}

}  // namespace bifree
