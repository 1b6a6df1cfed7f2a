// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace paragse {

// Runs fn(begin, end) over a partition of [0, n) on `workers` threads.
// Chunks are contiguous and disjoint, so callers writing to per-index
// slots need no synchronization and results cannot depend on the worker
// count. The first exception thrown by any chunk is rethrown to the
// caller after all threads join.
inline void parallel_for_chunks(size_t n, int workers,
                                const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  size_t w = static_cast<size_t>(std::max(workers, 1));
  w = std::min(w, n);
  if (w == 1) {
    fn(0, n);
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto guarded = [&](size_t begin, size_t end) {
    try {
      fn(begin, end);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(w);
  size_t chunk = (n + w - 1) / w;
  for (size_t i = 0; i < w; ++i) {
    size_t begin = i * chunk;
    size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&guarded, begin, end]() { guarded(begin, end); });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace paragse
