#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rascap {

/// Worker count for trial loops. Results never depend on it; it only
/// changes wall-clock time.
struct Workers {
  unsigned count = 1;

  /// Reads RASCAP_WORKERS; falls back to the hardware concurrency.
  static Workers from_env();
};

/// Runs body(i) for i in [0, n), splitting the range into contiguous
/// chunks across workers. The first exception thrown by any worker is
/// rethrown on the calling thread after all workers join.
template <class Body>
void parallel_for(std::size_t n, Workers workers, Body&& body) {
  const std::size_t w =
      std::max<std::size_t>(1, std::min<std::size_t>(workers.count, n));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t begin = n * t / w;
    const std::size_t end = n * (t + 1) / w;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rascap
