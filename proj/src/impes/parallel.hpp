#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace impes {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once, so writes to per-index slots need no locking.
/// The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const int end = std::min(n, (w + 1) * chunk);
        for (int i = w * chunk; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace impes
