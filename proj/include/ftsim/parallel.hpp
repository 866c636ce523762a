#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace ftsim::detail {

/// Runs f(k) for k in [0, n) across a small worker pool; callers write
/// results by index, so the merge order is deterministic.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&f, w, n, workers] {
      for (int k = w; k < n; k += workers) f(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ftsim::detail
