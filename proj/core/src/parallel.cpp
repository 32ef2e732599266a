#include "spectradiag/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spectradiag {
namespace {

std::atomic<std::size_t> g_override{0};

// Set on pool threads and the caller while a loop runs; nested loops go serial.
thread_local bool t_in_parallel = false;

std::size_t default_workers() {
  if (const char* env = std::getenv("SPECTRADIAG_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t worker_count() {
  const std::size_t forced = g_override.load();
  return forced > 0 ? forced : default_workers();
}

void set_worker_count(std::size_t workers) { g_override.store(workers); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = t_in_parallel ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&] {
    const bool outer = t_in_parallel;
    t_in_parallel = true;
    struct Reset {
      bool value;
      ~Reset() { t_in_parallel = value; }
    } reset{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ScopedWorkerCount::ScopedWorkerCount(std::size_t workers) : previous_(g_override.load()) {
  set_worker_count(workers);
}

ScopedWorkerCount::~ScopedWorkerCount() { set_worker_count(previous_); }

}  // namespace spectradiag
