#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bcplab {

/// Worker count: BCPLAB_THREADS caps it, default is available parallelism.
inline unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BCPLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

/// Run fn(chunk_index, begin, end) over [0, count) split into contiguous
/// chunks, one per worker. Callers are responsible for a deterministic
/// reduction of per-chunk results.
inline void parallel_chunks(std::size_t count,
                            const std::function<void(unsigned, std::size_t, std::size_t)>& fn,
                            unsigned max_threads = 0) {
    unsigned workers = max_threads ? std::min(max_threads, thread_budget()) : thread_budget();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        fn(0, 0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t per = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = std::min<std::size_t>(w * per, count);
        std::size_t hi = std::min<std::size_t>(lo + per, count);
        pool.emplace_back(fn, w, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace bcplab
