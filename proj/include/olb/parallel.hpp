#pragma once

// Deterministic index-range parallelism.  Workers write disjoint slots, so
// results are bit-identical for any thread count.  OLB_THREADS overrides the
// default worker count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace olb {

inline int& thread_count_override() {
  static int value = 0;  // 0 = use OLB_THREADS / hardware default
  return value;
}

inline void set_thread_count(int n) { thread_count_override() = n; }

inline int thread_count() {
  if (thread_count_override() > 0) return thread_count_override();
  if (const char* env = std::getenv("OLB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

template <class Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
  int workers = std::min<std::size_t>(thread_count(), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * workers));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace olb
