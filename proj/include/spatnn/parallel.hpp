#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace spatnn {

/// Worker count: --threads style override > NNCT_THREADS env > hardware.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("NNCT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

inline unsigned& thread_count_override() {
    static unsigned v = 0;  // 0 = use default
    return v;
}

inline unsigned thread_count() {
    const unsigned v = thread_count_override();
    return v ? v : default_thread_count();
}

/// Runs fn(chunk_index, begin, end) over a fixed contiguous partition of
/// [0, n). The partition depends only on n and the worker count, and callers
/// combine per-chunk results in chunk order, so results never depend on
/// scheduling. Replicate-level randomness must come from per-index streams.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t step = (n + workers - 1) / workers;
    for (std::size_t c = 0; c < workers; ++c) {
        const std::size_t b = c * step, e = std::min(n, b + step);
        if (b >= e) break;
        pool.emplace_back([&fn, c, b, e] { fn(c, b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace spatnn
