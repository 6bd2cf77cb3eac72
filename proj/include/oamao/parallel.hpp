#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace oamao {

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Indices are
/// dealt round-robin. The first exception (by worker order) is rethrown after
/// all workers finish.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers = threads < 1 ? 1 : std::min(count, static_cast<std::size_t>(threads));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < count; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace oamao
