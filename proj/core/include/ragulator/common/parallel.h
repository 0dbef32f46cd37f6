#ifndef RAGULATOR_COMMON_PARALLEL_H_
#define RAGULATOR_COMMON_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ragulator {

// Runs fn(i) for i in [0, n) on up to `max_threads` workers (0 = hardware
// concurrency). fn must not throw and must only write to per-index state.
template <typename Fn>
void ParallelFor(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
  unsigned workers =
      max_threads != 0 ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace ragulator

#endif  // RAGULATOR_COMMON_PARALLEL_H_
