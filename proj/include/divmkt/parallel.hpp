#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace divmkt {

/// Evaluates fn(0), ..., fn(count - 1) on up to `workers` threads. Results are
/// stored by index, so the output never depends on the worker count or on
/// scheduling. The first exception thrown by fn is rethrown after all
/// workers stop.
template <class Fn>
auto run_indexed(std::size_t count, int workers, Fn&& fn) {
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<Result> out(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };

    if (workers <= 1 || count <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        const auto n = static_cast<std::size_t>(workers) < count ? static_cast<std::size_t>(workers) : count;
        pool.reserve(n);
        for (std::size_t w = 0; w < n; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

} // namespace divmkt
