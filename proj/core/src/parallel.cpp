#include "jssr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace jssr {

namespace {
std::atomic<int> g_threads{0};

int effective_threads() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return std::max(1, n);
}
} // namespace

void set_thread_count(int n) { g_threads.store(n, std::memory_order_relaxed); }

int thread_count() { return effective_threads(); }

void parallel_for_chunked(std::int64_t begin, std::int64_t end,
                          const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;

    const int threads = effective_threads();
    if (threads == 1 || count < 256) {
        fn(begin, end);
        return;
    }

    const int parts = static_cast<int>(std::min<std::int64_t>(threads, count));
    const std::int64_t chunk = (count + parts - 1) / parts;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(parts));
    for (int p = 0; p < parts; ++p) {
        const std::int64_t lo = begin + p * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn) {
    parallel_for_chunked(begin, end, [&fn](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
}

} // namespace jssr
