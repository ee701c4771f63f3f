#pragma once

// OpenMP is optional: without it every kernel runs on the calling thread.
#if defined(TAME_OPENMP)
#include <omp.h>
#define TAME_OMP_PRAGMA(content) _Pragma(content)
#else
#define TAME_OMP_PRAGMA(content)
#endif

#include <cstddef>
#include <exception>
#include <vector>

namespace tame {

inline int max_threads() {
#if defined(TAME_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline bool openmp_enabled() {
#if defined(TAME_OPENMP)
    return true;
#else
    return false;
#endif
}

/// Runs body(i) for i in [0, n), across threads when parallel is set. An
/// exception thrown by any iteration is rethrown after the loop; when several
/// iterations throw, the one with the smallest index wins, so failures are
/// reported the same way at every thread count.
template <class Body>
void for_each_index(std::size_t n, bool parallel, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    if (parallel && n > 1) {
        const auto count = static_cast<long long>(n);
        TAME_OMP_PRAGMA("omp parallel for schedule(dynamic)")
        for (long long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace tame
