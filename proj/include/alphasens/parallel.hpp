#pragma once

#include <cstddef>
#include <vector>

namespace alphasens::parallel {

// Worker count for the OpenMP kernels: ALPHASENS_THREADS caps the team size,
// 0 or unset means "whatever OpenMP picks". Returns the effective cap.
int worker_count();

// Installs the ALPHASENS_THREADS cap process-wide (called by CLI entry points).
void apply_thread_env();

// Fixed partition width for parallel reductions. Partials are accumulated
// per block and combined in ascending block order, so the result is
// bit-identical for any thread count.
inline constexpr std::size_t kReduceBlock = 8192;

inline std::size_t block_count(std::size_t n) {
    return (n + kReduceBlock - 1) / kReduceBlock;
}

// Blockwise sum of f(i) over i in [0, n). F is invoked once per index.
template <typename F>
double blockwise_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += f(i);
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

// Blockwise max of f(i) over i in [0, n); exact under reordering.
template <typename F>
double blockwise_max(std::size_t n, F&& f, double identity) {
    if (n == 0) return identity;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, identity);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double m = identity;
        for (std::size_t i = lo; i < hi; ++i) {
            const double v = f(i);
            if (v > m) m = v;
        }
        partial[static_cast<std::size_t>(b)] = m;
    }
    double best = identity;
    for (double v : partial) {
        if (v > best) best = v;
    }
    return best;
}

}  // namespace alphasens::parallel
