#pragma once

// Minimal data-parallel loop. FLATLINK_THREADS caps the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace flatlink {

inline std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLATLINK_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) n = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Calls f(i) for i in [0, count) on up to worker_count() threads. The first
/// exception thrown by any call is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace flatlink
