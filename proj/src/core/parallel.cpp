#include "bifree/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bifree {

unsigned worker_count() {
  if (const char* env = std::getenv("BIFREE_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) return static_cast<unsigned>(requested);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Tally run_streams(std::int64_t trials, std::uint64_t root_seed,
                  const std::function<bool(Engine&)>& trial) {
  return run_blocks<Tally>(
      trials, root_seed,
      [&](Engine& engine, std::int64_t begin, std::int64_t end) {
        Tally t;
        for (std::int64_t i = begin; i < end; ++i) {
          if (trial(engine)) ++t.hits;
          ++t.trials;
        }
        return t;
      },
      [](Tally& acc, const Tally& part) { acc += part; });
}

}  // namespace bifree
