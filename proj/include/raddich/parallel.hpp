#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace raddich {

/// Worker count: RD_THREADS when it holds a positive integer (at most 256),
/// otherwise the hardware concurrency.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RD_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap > 0) n = static_cast<unsigned>(std::min(cap, 256L));
    } catch (const std::exception&) {
    }
  }
  return n;
}

/// Runs f(i) for i in [0, n) over contiguous static chunks. Callers write
/// results into per-index slots, so the outcome does not depend on the thread
/// count. If several indices throw, the exception of the smallest index is
/// rethrown.
template <typename F>
void parallel_for(std::size_t n, F&& f, unsigned threads = thread_count()) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
      for (std::size_t i = begin; i < end; ++i) {
        try {
          f(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_index[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  std::size_t best = n;
  std::exception_ptr first;
  for (unsigned t = 0; t < threads; ++t) {
    if (errors[t] && error_index[t] < best) {
      best = error_index[t];
      first = errors[t];
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace raddich
