#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace accbo::harness {

/// Calls fn(i) for i in [0, n) on up to `threads` workers (strided split).
/// fn must only write to slots owned by i. The first exception, in index
/// order, is rethrown after all workers join.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto body = [&](int w) {
    for (std::int64_t i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace accbo::harness
