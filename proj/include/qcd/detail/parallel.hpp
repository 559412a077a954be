#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qcd::detail {

// Worker cap: QCDEFORM_THREADS if set, hardware concurrency otherwise.
inline int thread_cap() {
  if (const char* env = std::getenv("QCDEFORM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static-chunk parallel loop over [0, n).  Results must be written by index;
// reductions are then performed by the caller in index order, which keeps
// byte-identical output across runs regardless of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int workers = std::min<int>(thread_cap(), static_cast<int>(n ? n : 1));
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < n;
             i += static_cast<std::size_t>(workers))
          body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qcd::detail
