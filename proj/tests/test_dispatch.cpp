#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "gpsl/dispatch.hpp"

using namespace gpsl;

TEST_CASE("results are independent of the worker count") {
  auto compute = [](const WorkerPool* pool) {
    std::vector<double> slots(200, 0.0);
    run_indexed(pool, 200, [&](int i) { slots[i] = std::sin(0.1 * i) * i; });
    return slots;
  };
  const WorkerPool one(1), four(4), eight(8);
  const std::vector<double> base = compute(nullptr);
  CHECK(compute(&one) == base);
  CHECK(compute(&four) == base);
  CHECK(compute(&eight) == base);
}

TEST_CASE("sleepy tasks actually overlap") {
  using clock = std::chrono::steady_clock;
  auto timed = [](const WorkerPool& pool) {
    std::vector<std::function<void()>> tasks(
        200, [] { std::this_thread::sleep_for(std::chrono::milliseconds(2)); });
    const auto t0 = clock::now();
    pool.run(tasks);
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  const double serial = timed(WorkerPool(1));
  const double parallel = timed(WorkerPool(8));
  CHECK(serial > 0.35);  // 200 x 2ms lower bound
  CHECK(parallel < 0.3 * serial);
}

TEST_CASE("the lowest-index failure is the one rethrown") {
  const WorkerPool pool(8);
  for (int round = 0; round < 20; ++round) {
    std::vector<std::function<void()>> tasks;
    for (int i = 0; i < 64; ++i)
      tasks.push_back([i] {
        if (i == 9 || i == 41) throw std::runtime_error("boom " + std::to_string(i));
      });
    try {
      pool.run(tasks);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "boom 9");
    }
  }
}

TEST_CASE("empty task lists are a no-op") {
  const WorkerPool pool(4);
  CHECK_NOTHROW(pool.run({}));
  int calls = 0;
  run_indexed(&pool, 0, [&](int) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("a null pool runs tasks inline on the calling thread") {
  const std::thread::id self = std::this_thread::get_id();
  std::vector<std::thread::id> seen(8);
  run_indexed(nullptr, 8, [&](int i) { seen[i] = std::this_thread::get_id(); });
  for (const auto& id : seen) CHECK(id == self);
}

TEST_CASE("worker counts below one are rejected") {
  CHECK_THROWS_AS(WorkerPool(0), std::invalid_argument);
  CHECK_THROWS_AS(WorkerPool(-2), std::invalid_argument);
}
