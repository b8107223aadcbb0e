#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rsb {

// Runs fn(i) for i in [0,n) on up to `workers` threads. Work items must be
// independent; callers store results by index, so the merged output does not
// depend on the worker count. The first exception is rethrown.
inline void parallel_for_index(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int nthreads = std::min(workers, n);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace rsb
