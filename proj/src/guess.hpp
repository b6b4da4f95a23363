#pragma once

// Parallel evaluation of independent guesses; the hit with the smallest index
// wins so results do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace nam::detail {

template <class T, class F>
std::optional<std::pair<std::size_t, T>> first_hit(std::size_t count, int jobs, F&& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{count};
  std::mutex mu;
  std::optional<std::pair<std::size_t, T>> result;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || i > best.load()) return;
      try {
        std::optional<T> r = fn(i);
        if (r) {
          std::lock_guard<std::mutex> lock(mu);
          if (!result || i < result->first) result.emplace(i, std::move(*r));
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        best.store(0);
        return;
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

}  // namespace nam::detail
