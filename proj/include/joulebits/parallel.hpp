#ifndef JOULEBITS_PARALLEL_HPP
#define JOULEBITS_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace joulebits {

// Worker count for a sweep of njobs independent items: hardware concurrency,
// capped by the JOULEBITS_THREADS environment variable when set.
inline std::size_t worker_count(std::size_t njobs) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("JOULEBITS_THREADS")) {
        char* end = nullptr;
        unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap >= 1 && cap < n) n = cap;
    }
    return njobs < n ? (njobs == 0 ? 1 : njobs) : n;
}

// Runs body(i) for i in [0, n). Each index owns its output slot, so results
// are independent of scheduling; the first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace joulebits

#endif  // JOULEBITS_PARALLEL_HPP
