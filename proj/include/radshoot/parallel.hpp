#pragma once

#include <atomic>
#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace radshoot {

// Every data-parallel kernel in this library takes an ExecPolicy. Serial is
// the reference path the tests compare against; Parallel uses OpenMP when it
// was compiled in and degrades to the serial loop otherwise. Kernels write
// into preallocated per-index slots and reduce serially afterwards, so the
// two policies produce byte-identical results.
enum class ExecPolicy { Serial, Parallel };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// n <= 0 restores the implementation default.
inline void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Runs fn(0) .. fn(n-1). Exceptions thrown by fn under the parallel policy
// are captured (first one wins) and rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, const Fn& fn, ExecPolicy policy = ExecPolicy::Parallel) {
#ifdef _OPENMP
    if (policy == ExecPolicy::Parallel && n > 1) {
        std::exception_ptr first_error;
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(radshoot_parallel_for_error)
                {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#else
    (void)policy;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace radshoot
