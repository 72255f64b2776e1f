#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace fbx::detail {

// Splits [0, count) into contiguous chunks, one per worker, and calls
// body(begin, end, worker). The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Body>
void parallel_for(std::int64_t count, unsigned workers, const Body& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    body(std::int64_t{0}, count, 0u);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, count));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t begin = std::min<std::int64_t>(count, chunk * w);
    const std::int64_t end = std::min<std::int64_t>(count, begin + chunk);
    threads.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fbx::detail
