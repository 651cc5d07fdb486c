#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ruin2d {

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Split [0, n) into fixed chunks and hand them to `workers` threads.
/// fn(chunk_index, begin, end) must only write to chunk-indexed storage;
/// chunk boundaries never depend on the worker count.
template <class Fn>
void for_each_chunk(std::uint64_t n, std::uint64_t chunk, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    chunk = std::max<std::uint64_t>(chunk, 1);
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, n_chunks));

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) return;
            const std::uint64_t begin = c * chunk;
            const std::uint64_t end = std::min(n, begin + chunk);
            try {
                fn(c, begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ruin2d
