#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace frametop {

// Fan out fn(0..count-1) over at most `jobs` threads. Results are collected by
// trial index and the lowest-index exception (if any) is rethrown, so the
// outcome never depends on scheduling.
template <typename F>
auto parallel_map(int count, int jobs, F&& fn)
    -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);

  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) slots[i] = fn(i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          slots[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(jobs, count);
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (int i = 0; i < count; ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);
  }

  std::vector<R> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(std::move(*slots[i]));
  return out;
}

}  // namespace frametop
