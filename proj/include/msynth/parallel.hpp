#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace msynth {

inline int resolveWorkers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n). Work is chunked by index so each item is
/// processed exactly once regardless of worker count; fn must only write to
/// per-index slots for results to be independent of scheduling.
template <typename Fn>
void parallelFor(std::size_t n, const Fn& fn, int workers = 0) {
  const int w = std::min<std::size_t>(resolveWorkers(workers), n == 0 ? 1 : n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&, t]() {
      for (std::size_t i = t; i < n; i += w) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace msynth
