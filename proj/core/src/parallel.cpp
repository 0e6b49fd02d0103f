#include "revmax/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace revmax {

std::size_t thread_count() {
    if (const char* env = std::getenv("REVMAX_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for_chunks(std::uint64_t total, std::uint64_t chunk_size,
                         const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (total == 0) {
        return;
    }
    if (chunk_size == 0) {
        chunk_size = 1;
    }
    const std::uint64_t chunks = (total + chunk_size - 1) / chunk_size;
    const std::size_t workers = std::min<std::size_t>(thread_count(), chunks);

    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) {
            const std::uint64_t begin = c * chunk_size;
            fn(c, begin, std::min(begin + chunk_size, total));
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) {
                return;
            }
            const std::uint64_t begin = c * chunk_size;
            fn(c, begin, std::min(begin + chunk_size, total));
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 0; i + 1 < workers; ++i) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace revmax
