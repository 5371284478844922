#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace minlift::detail {

// Worker count: MINLIFT_THREADS caps it; otherwise hardware concurrency, capped at 8.
inline int thread_budget() {
  static const int budget = [] {
    if (const char* env = std::getenv("MINLIFT_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return std::min(v, 64);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
  }();
  return budget;
}

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; results must be
// written by index so the outcome is identical to the serial order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int threads = thread_budget();
  if (threads <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = static_cast<std::size_t>(threads);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * step;
    const std::size_t hi = std::min(n, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&, c, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace minlift::detail
