#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace gbart {

/// Runs body(i) for i in [0, count) on up to `workers` OpenMP threads
/// (0 = runtime default). The first exception by index is rethrown after the
/// loop. Callers write results into per-index slots, so output never depends
/// on the thread count.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gbart
