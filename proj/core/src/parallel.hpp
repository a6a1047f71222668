#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ael::detail {

// Runs fn(k) for k in [0, count) on up to `threads` threads. The first
// exception thrown by any call is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < workers; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace ael::detail
