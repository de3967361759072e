#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace textsplat {

// Worker count: TEXTSPLAT_THREADS if set, else hardware concurrency.
inline int thread_count() {
    static int n = [] {
        if (const char* env = std::getenv("TEXTSPLAT_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc ? int(hc) : 1;
    }();
    return n;
}

// Runs fn(chunk) for chunk in [0, n_chunks). Chunks are statically assigned
// to workers (chunk c -> worker c % T), so any per-chunk output is identical
// regardless of worker count; callers reduce per-chunk results in chunk order.
inline void parallel_chunks(int n_chunks, const std::function<void(int)>& fn) {
    int workers = std::min(thread_count(), n_chunks);
    if (workers <= 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int c = w; c < n_chunks; c += workers) fn(c);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace textsplat
