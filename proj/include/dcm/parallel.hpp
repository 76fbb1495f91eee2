#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcm {

/// True when the library was built with OpenMP.
inline bool parallel_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, n). Iterations must be independent and write
/// only to index-addressed slots, so the reduction is deterministic no
/// matter how iterations are scheduled. `parallel = false` forces the
/// serial reference path (used by tests and the benchmark).
template <class F>
void parallel_for(long n, F&& fn, bool parallel = true) {
#ifdef _OPENMP
    if (parallel && n > 1) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
#else
    (void)parallel;
#endif
    for (long i = 0; i < n; ++i) fn(i);
}

} // namespace dcm
