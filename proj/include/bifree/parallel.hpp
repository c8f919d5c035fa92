#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "bifree/rng.hpp"

namespace bifree {

/// Trials are cut into fixed-size blocks; block b always draws from
/// stream_seed(root, b), so results do not depend on the worker count.
inline constexpr std::int64_t kStreamBlock = 4096;

struct Tally {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  Tally& operator+=(const Tally& other) {
    hits += other.hits;
    trials += other.trials;
    return *this;
  }
};

/// Number of workers used by run_streams; BIFREE_THREADS overrides.
unsigned worker_count();

/// Runs `trial(engine)` `trials` times, partitioned into seeded blocks, and
/// folds the boolean outcomes into a Tally. `trial` must be safe to call
/// concurrently from different threads with distinct engines.
Tally run_streams(std::int64_t trials, std::uint64_t root_seed,
                  const std::function<bool(Engine&)>& trial);

/// Generic form: `block(engine, begin, end)` processes trials [begin, end) of
/// one block and returns a partial result; partials are combined in block
/// order with `combine`.
template <typename Partial>
Partial run_blocks(std::int64_t trials, std::uint64_t root_seed,
                   const std::function<Partial(Engine&, std::int64_t, std::int64_t)>& block,
                   const std::function<void(Partial&, const Partial&)>& combine) {
  const std::int64_t blocks = (trials + kStreamBlock - 1) / kStreamBlock;
  std::vector<Partial> partials(static_cast<std::size_t>(std::max<std::int64_t>(blocks, 0)));
  auto work = [&](std::int64_t b) {
    Engine engine = make_engine(stream_seed(root_seed, static_cast<std::uint64_t>(b)));
    const std::int64_t begin = b * kStreamBlock;
    const std::int64_t end = std::min(trials, begin + kStreamBlock);
    partials[static_cast<std::size_t>(b)] = block(engine, begin, end);
  };
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::int64_t>(blocks, 1)));
  if (workers <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += workers) work(b);
      });
    }
    for (auto& t : pool) t.join();
  }
  Partial total{};
  for (const auto& p : partials) combine(total, p);
  return total;
}

}  // namespace bifree
