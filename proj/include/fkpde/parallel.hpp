#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fkpde {

/// Worker count used by parallel batches; 0 restores the runtime default.
void set_num_threads(int threads);
int num_threads();

/// Runs body(state, i) for i in [0, n) on the worker pool. `make_state` is
/// called once per worker to build its scratch state. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <class MakeState, class Body>
void parallel_for(std::size_t n, MakeState&& make_state, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mu;
  std::atomic<bool> failed{false};
#pragma omp parallel num_threads(num_threads())
  {
    auto state = make_state();
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        body(state, static_cast<std::size_t>(i));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Pairwise summation in a fixed order (independent of thread count).
double pairwise_sum(std::span<const double> values);

}  // namespace fkpde
