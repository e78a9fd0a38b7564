// Copyright 2026 The advrisk Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVRISK_PARALLEL_HPP_
#define ADVRISK_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace advrisk {

// Worker cap: ADVRISK_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
inline unsigned worker_count(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ADVRISK_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into contiguous chunks and calls body(begin, end, chunk) on
// up to `workers` threads. Chunk c always covers the same range, so results
// written per chunk can be merged deterministically. Rethrows the first
// exception raised by a worker.
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, std::size_t n_chunks,
                     Body&& body) {
  if (n == 0) return;
  n_chunks = std::max<std::size_t>(1, std::min(n_chunks, n));
  auto range = [&](std::size_t c) {
    return std::pair{n * c / n_chunks, n * (c + 1) / n_chunks};
  };
  if (workers <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const auto [b, e] = range(c);
      body(b, e, c);
    }
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      std::size_t c;
      {
        std::lock_guard lock(mutex);
        if (next >= n_chunks || error) return;
        c = next++;
      }
      try {
        const auto [b, e] = range(c);
        body(b, e, c);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    const unsigned t = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
    for (unsigned i = 0; i < t; ++i) threads.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace advrisk

#endif  // ADVRISK_PARALLEL_HPP_
