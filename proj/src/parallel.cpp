#include "catmzi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace catmzi {

int worker_count(std::size_t jobs) {
    if (jobs <= 1)
        return 1;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0)
        hw = 1;
    std::size_t n = hw;
    if (const char* env = std::getenv("CATMZI_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            n = std::min(n, static_cast<std::size_t>(v));
    }
    return static_cast<int>(std::min(n, jobs));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t)
        pool.emplace_back(drain);
    drain();
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace catmzi
