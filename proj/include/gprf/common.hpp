#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gprf {

inline constexpr const char* kVersion = "0.1.0";

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Bad inputs: shapes, hyperparameters, unknown config keys, wrong partition kind.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: factorization failure after jitter escalation,
// indefinite combined precision, repeated line-search failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem too large for the dense desk-scale paths.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs fn(i) for i in [0, count). With workers > 1 tasks execute on a small
// thread pool; callers are responsible for writing results into disjoint
// slots and reducing in a fixed order afterwards. The first exception thrown
// by any task is rethrown on the calling thread.
template <class F>
void parallel_for(int count, int workers, F&& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int nthreads = std::min(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Scopes Eigen's internal (OpenMP) parallelism to one thread while our own
// task pool is active, restoring the previous setting on exit.
class EigenThreadGuard {
 public:
  explicit EigenThreadGuard(int nthreads)
      : previous_(Eigen::nbThreads()) {
    Eigen::setNbThreads(nthreads);
  }
  ~EigenThreadGuard() { Eigen::setNbThreads(previous_); }
  EigenThreadGuard(const EigenThreadGuard&) = delete;
  EigenThreadGuard& operator=(const EigenThreadGuard&) = delete;

 private:
  int previous_;
};

}  // namespace gprf
