#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "chiral/core.hpp"

namespace chiral {

/// Worker count from CHIRAL_WORKERS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("CHIRAL_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, n) on a bounded pool. Each index must write only
/// its own output slot; results are then independent of scheduling. The
/// first exception (by index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(Index n, Fn&& fn, int workers = 0) {
  if (workers <= 0) workers = worker_count();
  workers = static_cast<int>(std::min<Index>(workers, n));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (Index i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace chiral
