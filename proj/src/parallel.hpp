#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace modrec::detail {

// Runs body(i) for i in [0, n) on an OpenMP team (threads <= 0: runtime
// default) and rethrows the first exception after the loop. body must only
// write to slots owned by index i.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    std::exception_ptr error;
    std::mutex error_mutex;
    const int team = threads > 0 ? threads : omp_get_max_threads();
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(team)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace modrec::detail
