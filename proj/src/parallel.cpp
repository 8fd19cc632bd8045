#include "swarmheat/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swarmheat {

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
    if (workers == 1) {
        body(0, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        const std::size_t chunk = n / workers;
        const std::size_t extra = n % workers;
        std::size_t begin = 0;
        std::size_t first_end = 0;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t end = begin + chunk + (w < extra ? 1 : 0);
            if (w == 0) {
                first_end = end;
            } else {
                pool.emplace_back([&, begin, end] {
                    try {
                        body(begin, end);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                });
            }
            begin = end;
        }
        try {
            body(0, first_end);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace swarmheat
