#include "spectrace/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace spectrace {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    return n;
}

void set_default_threads(int n) { g_threads.store(std::max(0, n), std::memory_order_relaxed); }

void parallel_for(int n, const std::function<void(int)>& body, int threads) {
    if (n <= 0) return;
    int workers = threads > 0 ? threads : default_threads();
    workers = std::min(workers, n);

    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }

    // Contiguous block partition; exceptions recorded per worker and the one
    // covering the smallest index is rethrown for a deterministic error path.
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    const int base = n / workers, extra = n % workers;
    int begin = 0;
    for (int w = 0; w < workers; ++w) {
        const int count = base + (w < extra ? 1 : 0);
        const int end = begin + count;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (int i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace spectrace
