#pragma once

#include <atomic>
#include <climits>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spinchain {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(0 .. n_items-1) on up to n_threads workers. Each item writes its
/// own output slot, so results are identical for every thread count; if
/// several items throw, the lowest index wins.
inline void parallel_for(int n_items, int n_threads,
                         const std::function<void(int)>& body) {
  if (n_items <= 0) return;
  n_threads = std::min(resolve_threads(n_threads), n_items);
  if (n_threads <= 1) {
    for (int i = 0; i < n_items; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  int error_index = INT_MAX;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spinchain
