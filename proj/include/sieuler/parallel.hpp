#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace sieuler {

/// Chunked parallel map over [0, n).  Each index does independent work and
/// writes only its own slot, so results are bitwise independent of the
/// thread count; reductions inside one index run in a fixed order.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int t = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&, w]() {
            const std::size_t lo = n * w / t, hi = n * (w + 1) / t;
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace sieuler
