#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gradflow {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. Work is claimed index by
/// index, so callers that write results into slot i get output independent of the
/// thread count. The first exception thrown by fn is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace gradflow
