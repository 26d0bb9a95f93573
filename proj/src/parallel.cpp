#include "smootherlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace smootherlab {

namespace {

std::atomic<int> g_limit{0};

int env_threads() {
  const char* s = std::getenv("SMOOTHERLAB_THREADS");
  if (s == nullptr || *s == '\0') return 0;
  try {
    return std::max(0, std::stoi(s));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

int worker_count() {
  if (const int limit = g_limit.load(); limit > 0) return limit;
  if (const int env = env_threads(); env > 0) return env;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_limit(int threads) { g_limit.store(std::max(0, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;

  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace smootherlab
