#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mcmle {

/// Worker count used when the caller passes 0.
inline unsigned default_workers() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for every i in [0, count), split into contiguous blocks over
/// `workers` threads (0 means default_workers()).  fn must only write to
/// per-index state.  The exception from the lowest-numbered failing block is
/// rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  const std::size_t n_threads = std::min<std::size_t>(workers, std::max<std::size_t>(count, 1));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n_threads);
  {
    std::vector<std::jthread> threads;
    threads.reserve(n_threads);
    const std::size_t block = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::min(count, t * block);
      const std::size_t end = std::min(count, begin + block);
      threads.emplace_back([&, t, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mcmle
