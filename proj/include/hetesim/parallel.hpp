/*
 *   Copyright 2026 the hetesim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace hetesim {

/// Process-wide cap on worker threads (CLI `--threads`). 0 means "use
/// hardware concurrency".
inline std::atomic<unsigned>& max_threads_setting() {
  static std::atomic<unsigned> value{0};
  return value;
}

inline void set_max_threads(unsigned n) { max_threads_setting().store(n); }

inline unsigned effective_threads() {
  unsigned cap = max_threads_setting().load();
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

/// Runs fn(begin, end) over a contiguous partition of [0, total).
/// Work items must be independent; the partition is deterministic but
/// the execution order is not, so fn must not carry cross-chunk state.
template <typename Fn>
void parallel_for(std::int64_t total, Fn&& fn) {
  if (total <= 0) return;
  unsigned workers = effective_threads();
  std::int64_t chunk = (total + workers - 1) / workers;
  if (workers <= 1 || total < 2 * static_cast<std::int64_t>(workers)) {
    fn(std::int64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
    std::int64_t end = std::min(total, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hetesim
