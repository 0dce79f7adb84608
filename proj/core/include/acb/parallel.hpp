// Copyright 2026 The acbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACBENCH_ACB_PARALLEL_HPP_
#define ACBENCH_ACB_PARALLEL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace acb {

// Runs fn(i) for i in [0, n) across up to `workers` threads. fn writes only
// to per-index slots; result bytes are identical for any worker count. The
// first exception thrown by any fn is rethrown on the caller thread.
inline void parallel_for(size_t n, unsigned workers,
                         const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned n_threads = workers == 0 ? hw : workers;
  if (n_threads > n) n_threads = static_cast<unsigned>(n);
  if (n_threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  constexpr size_t kChunk = 16;
  auto body = [&]() {
    for (;;) {
      size_t begin = next.fetch_add(kChunk);
      if (begin >= n || failed.load(std::memory_order_relaxed)) return;
      size_t end = begin + kChunk < n ? begin + kChunk : n;
      for (size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace acb

#endif  // ACBENCH_ACB_PARALLEL_HPP_
