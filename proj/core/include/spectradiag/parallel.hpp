#pragma once

#include <cstddef>
#include <functional>

namespace spectradiag {

/// Number of workers used by parallel loops. Defaults to the value of
/// SPECTRADIAG_THREADS, else hardware concurrency.
std::size_t worker_count();

/// Overrides the worker count; 0 restores the default.
void set_worker_count(std::size_t workers);

/// Runs body(i) for i in [0, n). Results must be written to index-addressed
/// slots so that output does not depend on the worker count. The first
/// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// RAII override of the worker count, restored on scope exit.
class ScopedWorkerCount {
 public:
  explicit ScopedWorkerCount(std::size_t workers);
  ~ScopedWorkerCount();
  ScopedWorkerCount(const ScopedWorkerCount&) = delete;
  ScopedWorkerCount& operator=(const ScopedWorkerCount&) = delete;

 private:
  std::size_t previous_;
};

}  // namespace spectradiag
