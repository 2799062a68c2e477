#include "entroscale/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace entroscale {

std::size_t resolve_thread_count() {
    if (const char* env = std::getenv("ENTROSCALE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return v > 256 ? 256 : std::size_t(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace entroscale
