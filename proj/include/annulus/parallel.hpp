#ifndef ANNULUS_PARALLEL_HPP
#define ANNULUS_PARALLEL_HPP

#include <atomic>
#include <thread>
#include <vector>

namespace annulus {

/*
 * Work-stealing-free index loop: spawn up to `threads` workers pulling
 * indices from an atomic counter.  `fn(i)` must not throw; callers wrap
 * their bodies and stash failures per index, which keeps results
 * independent of scheduling.
 */
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn)
{
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        workers.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count)
                    return;
                fn(i);
            }
        });
    for (auto& w : workers)
        w.join();
}

} // namespace annulus

#endif
