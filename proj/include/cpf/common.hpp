#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cpf {

/// Raised for problems with user-supplied data or parameters (bad files,
/// incompatible schemas, out-of-range parameters). The CLI maps these to
/// exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Resolves a thread-count request: 0 means "use available parallelism",
/// otherwise the value is clamped to at least 1.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) on up to `threads` threads using static
/// contiguous ranges. Each index must write only its own output slots, so
/// results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Locale-independent float formatting with 17 significant digits, enough
/// to round-trip any double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace cpf
