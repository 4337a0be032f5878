#pragma once

#include <omp.h>

namespace hsgc {

/// Caps the OpenMP worker count for subsequent kernels; n <= 0 leaves the
/// runtime default in place.
inline void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int thread_count() { return omp_get_max_threads(); }

}  // namespace hsgc
