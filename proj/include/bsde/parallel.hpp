#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace bsde {

// Runs fn(i) for i in [0, count) over `workers` threads in contiguous chunks.
// Each index writes only its own output slot, so results do not depend on the
// worker count; reductions over the outputs must stay sequential to keep them
// bit-reproducible.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers <= 1 || count < 2 * workers) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        if (lo >= count) break;
        const std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace bsde
