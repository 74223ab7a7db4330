#include "fracprop/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace fracprop {

unsigned thread_count() {
    unsigned fallback = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("FRACPROP_THREADS");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec != std::errc() || *ptr != '\0' || value == 0) {
        return fallback;
    }
    return value;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace fracprop
