#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sncf {

/// Explicit request if non-zero, else SNCF_THREADS, else the core count.
std::size_t resolve_threads(std::size_t requested);

/// Calls body(i) for i in [0, count). Work items are claimed dynamically;
/// results are deterministic as long as body(i) only writes slot i.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    const std::size_t n_workers = threads < count ? threads : count;
    std::vector<std::jthread> pool;
    pool.reserve(n_workers - 1);
    for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace sncf
