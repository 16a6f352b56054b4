#pragma once
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace levyruin {

inline int clamp_workers(int workers) {
    if (workers <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        workers = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return workers;
}

// Runs fn(0..w-1) on w threads; the first captured exception is rethrown
// after all workers joined. Workers must only write to their own slots.
template <typename Fn>
void run_workers(std::size_t w, const Fn& fn) {
    std::vector<std::exception_ptr> errs(w);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t s = 0; s < w; ++s)
        threads.emplace_back([&, s] {
            try {
                fn(s);
            } catch (...) {
                errs[s] = std::current_exception();
            }
        });
    for (auto& th : threads) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace levyruin
