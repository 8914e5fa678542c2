#ifndef LRR_PARALLEL_HPP
#define LRR_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace lrr {

// Thread cap: FLOQUET_LRR_THREADS if set, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("FLOQUET_LRR_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
// so results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int threads = thread_count();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t t = std::min<std::size_t>(threads, n);
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace lrr

#endif
