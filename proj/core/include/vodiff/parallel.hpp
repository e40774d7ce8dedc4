#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace vodiff {

/** Static-partition parallel map over [0, n): each index is processed exactly
 * once by one worker; workers share nothing but the callable.  Falls back to
 * a plain loop when hardware offers a single thread. */
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_chunk = 16) {
    std::size_t hw = std::thread::hardware_concurrency();
    std::size_t workers = hw == 0 ? 1 : hw;
    if (min_chunk > 0) workers = std::min(workers, (n + min_chunk - 1) / min_chunk);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace vodiff
