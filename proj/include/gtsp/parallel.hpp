#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace gtsp {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers write into
// per-index slots, so the result never depends on scheduling.
template <class Fn>
void parallel_for(int workers, int count, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errs(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// --workers, then GTSP_WORKERS, then 1.
int resolve_workers(int requested);

}  // namespace gtsp
