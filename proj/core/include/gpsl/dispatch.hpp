#pragma once

#include <functional>
#include <vector>

namespace gpsl {

// Fixed-width fan-out for independent tasks. run() blocks until all tasks
// have finished. Tasks write into caller-owned slots, so results do not
// depend on scheduling; if several tasks throw, the exception with the
// smallest task index is rethrown, which keeps failures deterministic too.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);

  int workers() const { return workers_; }
  void run(const std::vector<std::function<void()>>& tasks) const;

 private:
  int workers_;
};

// Convenience wrapper: fn(i) for i in [0, n), fanned out over the pool.
// A null pool runs everything inline.
void run_indexed(const WorkerPool* pool, int n, const std::function<void(int)>& fn);

}  // namespace gpsl
