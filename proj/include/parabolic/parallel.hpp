#ifndef PARABOLIC_PARALLEL_HPP
#define PARABOLIC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace parabolic {

namespace detail {
inline std::atomic<int>& thread_setting()
{
    static std::atomic<int> value{0};
    return value;
}
} // namespace detail

/// Worker count: an explicit set_thread_count wins, then the THREADS
/// environment variable, then the hardware concurrency.
inline int thread_count()
{
    const int set = detail::thread_setting().load();
    if (set > 0) return set;
    if (const char* env = std::getenv("THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_thread_count(int n) { detail::thread_setting().store(std::max(0, n)); }

/// Calls fn(i) for i in [0, n). Each index writes only its own outputs, so
/// results do not depend on scheduling. The exception of the lowest failing
/// index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::size_t failed_index = n;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace parabolic

#endif // PARABOLIC_PARALLEL_HPP
