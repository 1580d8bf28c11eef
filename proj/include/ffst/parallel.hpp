// parallel.hpp — OpenMP index-parallel map with exception capture

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>

namespace ffst {

// Runs fn(i) for i in [0, count), in parallel when requested. Each call must
// write only to its own output slot; callers reduce in index order afterwards,
// which keeps results bit-identical for any thread count. The first exception
// is captured and rethrown after the loop instead of terminating the program.
template <typename F>
void parallel_indexed(std::int64_t count, bool parallel, F&& fn) {
    std::exception_ptr error = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(ffst_parallel_indexed)
            {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace ffst
