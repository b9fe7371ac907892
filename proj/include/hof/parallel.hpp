#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hof {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Cells are independent
// and results are written by index, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn)
{
    std::size_t w = std::max(1, workers);
    w = std::min(w, n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, int workers, Fn&& fn)
{
    std::vector<R> out(n);
    parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace hof
