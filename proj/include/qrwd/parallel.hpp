#pragma once

#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qrwd {

// Thread budget: min(QRWD_THREADS, omp max). 1 disables parallel loops.
inline int thread_budget() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("QRWD_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Row-parallel loop. Bodies must write disjoint state per index; no
// cross-index floating-point reductions happen here, so results are
// bit-identical to the serial path.
template <class F>
void parallel_for(long n, F&& body, bool force_serial = false) {
    if (force_serial || thread_budget() == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) body(i);
#else
    for (long i = 0; i < n; ++i) body(i);
#endif
}

template <class F>
void serial_for(long n, F&& body) {
    parallel_for(n, body, true);
}

}  // namespace qrwd
