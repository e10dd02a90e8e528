#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtirl {

enum class Execution { serial, parallel };

/// Effective worker count for `jobs` (0 = OpenMP default, 1 without OpenMP).
inline int resolve_jobs(int jobs) noexcept {
#ifdef _OPENMP
    return jobs > 0 ? jobs : omp_get_max_threads();
#else
    (void)jobs;
    return 1;
#endif
}

/// Runs `fn(i)` for every i in [0, n). Cells must be independent: each one
/// writes only its own output slot. The serial path is the reference the
/// parallel path is tested against. The first exception thrown by any cell is
/// rethrown after the loop.
template <class Fn>
void for_each_cell(std::size_t n, Execution exec, int jobs, Fn&& fn) {
    if (exec == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_jobs(jobs))
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace mtirl
