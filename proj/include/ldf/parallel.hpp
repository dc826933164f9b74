#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ldf::par {

// Execution policy for the data-parallel kernels. threads == 1 runs the
// plain serial loop (the reference path used in tests); threads <= 0 lets
// OpenMP pick. Kernels only parallelise over disjoint output slots, so the
// parallel result is bitwise identical to the serial one.
struct Exec {
  int threads = 1;

  bool serial() const { return threads == 1; }
};

inline Exec serial() { return Exec{1}; }
inline Exec auto_threads() { return Exec{0}; }

template <typename F>
void for_index(std::size_t n, const Exec& exec, F&& body) {
  if (exec.serial() || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  const std::int64_t count = static_cast<std::int64_t>(n);
  if (exec.threads > 0) {
#pragma omp parallel for schedule(static) num_threads(exec.threads)
    for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace ldf::par
