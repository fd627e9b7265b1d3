#pragma once

// Worker-pool capability handed to modules by the CLI. Modules never spawn
// threads on their own; they receive one of these and map pure work items
// over it. Results must be written to per-index slots so the caller can
// reduce in a fixed order.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kpow {

struct ParallelMap {
    unsigned workers = 1;

    static ParallelMap hardware() {
        unsigned n = std::thread::hardware_concurrency();
        return ParallelMap{n == 0 ? 1 : n};
    }

    // fn(i) for i in [0, n_items); fn must not touch shared mutable state
    template <class Fn>
    void run(std::size_t n_items, Fn&& fn) const {
        if (n_items == 0) return;
        unsigned w = workers;
        if (w <= 1 || n_items == 1) {
            for (std::size_t i = 0; i < n_items; ++i) fn(i);
            return;
        }
        if (w > n_items) w = unsigned(n_items);
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n_items) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
};

} // namespace kpow
