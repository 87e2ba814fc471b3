#ifndef ARW_PARALLEL_HPP
#define ARW_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace arw {

inline unsigned effective_threads(unsigned requested) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (requested == 0) return hw;
    return requested < hw ? requested : hw;
}

/// Runs fn(chunk_index, begin, end) over a fixed partition of [0, n_items)
/// into n_chunks contiguous ranges. The partition is a pure function of
/// (n_items, n_chunks); the thread count only affects scheduling, so any
/// per-chunk outputs combined in chunk order are bit-identical across runs.
template <typename Fn>
void parallel_chunks(std::size_t n_items, std::size_t n_chunks, unsigned n_threads, Fn&& fn) {
    if (n_items == 0) return;
    if (n_chunks == 0) n_chunks = 1;
    if (n_chunks > n_items) n_chunks = n_items;

    auto chunk_bounds = [&](std::size_t c) {
        const std::size_t lo = n_items * c / n_chunks;
        const std::size_t hi = n_items * (c + 1) / n_chunks;
        return std::pair<std::size_t, std::size_t>{lo, hi};
    };

    const unsigned workers = effective_threads(n_threads);
    if (workers <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            auto [lo, hi] = chunk_bounds(c);
            fn(c, lo, hi);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            auto [lo, hi] = chunk_bounds(c);
            fn(c, lo, hi);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace arw

#endif  // ARW_PARALLEL_HPP
