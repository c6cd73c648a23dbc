#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace jdlab {

int default_workers();
void set_default_workers(int n); // 0 restores the hardware default

// Runs fn(i) for i in [0, n) across `workers` threads. Tasks must write
// only to their own slot of any shared output so results do not depend on
// scheduling; reductions belong to the caller, in index order.
inline void parallel_for_index(std::size_t n, int workers,
                               const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 0) workers = default_workers();
    const std::size_t nthreads = std::min<std::size_t>(workers, n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mtx;
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        threads.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mtx);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace jdlab
