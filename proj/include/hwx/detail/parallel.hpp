#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hwx::detail {

/// Split [0, n) into contiguous chunks, run body(begin, end, chunk) on a
/// thread per chunk and rethrow the first exception. Results are merged by
/// the caller in chunk order, so reductions stay deterministic.
template <class Body>
std::size_t parallel_chunks(std::size_t n, Body&& body, std::size_t min_chunk = 256) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t chunks = std::max<std::size_t>(1, std::min(hw, n / std::max<std::size_t>(1, min_chunk)));
    if (chunks == 1) {
        body(std::size_t{0}, n, std::size_t{0});
        return 1;
    }
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = n * c / chunks;
        const std::size_t hi = n * (c + 1) / chunks;
        pool.emplace_back([&, lo, hi, c] {
            try {
                body(lo, hi, c);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return chunks;
}

}  // namespace hwx::detail
