#pragma once
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace batsv2x {

// Runs fn(i) for i in [0, n) across up to `workers` threads. Work items must
// be independent; callers keep determinism by indexing results with i.
inline void parallel_for(int n, const std::function<void(int)>& fn, int workers = 0) {
    if (workers <= 0) workers = (int)std::thread::hardware_concurrency();
    if (workers < 1) workers = 1;
    if (workers == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int nthreads = std::min(workers, n);
    std::exception_ptr err = nullptr;
    std::mutex err_mu;
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace batsv2x
