#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nugget {

/// Execution policy for the per-record kernels. `Serial` is the reference
/// path; `Parallel` distributes independent records over OpenMP threads.
/// Every kernel writes results by record index, so both paths produce
/// bit-identical output.
enum class Exec { Serial, Parallel };

int max_threads();

/// Calls body(i) for i in [0, count). The first exception thrown by any
/// iteration is rethrown on the calling thread after the loop completes.
template <class Body>
void for_each_index(Exec exec, std::size_t count, Body&& body) {
  if (exec == Exec::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nugget
