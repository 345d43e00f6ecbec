#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace genlie {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
// processed exactly once; the exception of the smallest failing index is
// rethrown after all workers finish.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  {
    std::vector<std::jthread> threads;
    threads.reserve(count);
    for (std::size_t k = 0; k < count; ++k) threads.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace genlie
