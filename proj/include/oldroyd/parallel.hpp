#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace oldroyd {

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `workers`
/// threads. Chunk boundaries only depend on n and workers.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2 * w) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t begin = std::min(n, k * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&, k, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace oldroyd
