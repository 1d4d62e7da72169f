// rawspoof/parallel.h

// Copyright 2026 The rawspoof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RAWSPOOF_PARALLEL_H_
#define RAWSPOOF_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rawspoof {

/// Worker count used when a caller passes 0.
inline std::size_t DefaultWorkers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, n) on up to `workers` threads.  Items are
/// claimed dynamically, so `fn` must only write to per-item slots; callers
/// merge results in index order afterwards.  The first exception thrown by
/// any item is rethrown on the calling thread.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn &&fn) {
  if (workers == 0) workers = DefaultWorkers();
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rawspoof

#endif  // RAWSPOOF_PARALLEL_H_
