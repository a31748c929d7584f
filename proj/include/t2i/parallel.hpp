// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <limits>

#include <omp.h>

namespace t2i {

/// OpenMP loop over [0, n). An exception thrown by body(i) is captured and
/// the one from the lowest failing index is rethrown after the loop, so the
/// reported error does not depend on the thread count.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
  std::exception_ptr error;
  std::int64_t error_index = std::numeric_limits<std::int64_t>::max();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(t2i_parallel_for_error)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Scoped override of the OpenMP thread count.
class ThreadCountGuard {
 public:
  explicit ThreadCountGuard(int threads) : previous_(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(threads);
  }
  ~ThreadCountGuard() { omp_set_num_threads(previous_); }
  ThreadCountGuard(const ThreadCountGuard&) = delete;
  ThreadCountGuard& operator=(const ThreadCountGuard&) = delete;

 private:
  int previous_;
};

}  // namespace t2i
