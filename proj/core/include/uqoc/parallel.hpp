// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace uqoc {

/// Process-wide cap on worker threads used by parallel_for (>= 1).
void set_max_jobs(int jobs) noexcept;
int max_jobs() noexcept;

/// Runs fn(i) for i in [0, n) on up to max_jobs() threads. Work items must
/// write only to their own output slot; callers reduce afterwards in index
/// order, which keeps results independent of the worker count. The first
/// exception thrown by any item is rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, F &&fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(max_jobs()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace uqoc
