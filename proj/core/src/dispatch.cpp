#include "gpsl/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace gpsl {

WorkerPool::WorkerPool(int workers) : workers_(workers) {
  if (workers < 1) throw std::invalid_argument("WorkerPool: workers >= 1");
}

void WorkerPool::run(const std::vector<std::function<void()>>& tasks) const {
  const int n = static_cast<int>(tasks.size());
  if (n == 0) return;

  if (workers_ == 1 || n == 1) {
    for (const auto& task : tasks) task();
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int spawn = std::min(workers_, n);
  std::vector<std::thread> threads;
  threads.reserve(spawn);
  for (int i = 0; i < spawn; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (int i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

void run_indexed(const WorkerPool* pool, int n, const std::function<void(int)>& fn) {
  if (!pool || pool->workers() == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::function<void()>> tasks;
  tasks.reserve(n);
  for (int i = 0; i < n; ++i) tasks.push_back([&fn, i] { fn(i); });
  pool->run(tasks);
}

}  // namespace gpsl
