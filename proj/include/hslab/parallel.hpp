#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

// Deterministic OpenMP reductions. Work is split into fixed-size blocks,
// each block is accumulated serially, and the per-block partials are
// combined in block order on one thread. The result is bitwise identical
// for any thread count, which the scenario runner relies on.

namespace hslab {

inline constexpr std::size_t kReduceBlock = 8192;

template <class F>
double block_sum(std::size_t n, F&& term) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

template <class F>
double block_max(std::size_t n, F&& term) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
        partial[static_cast<std::size_t>(b)] = m;
    }
    double total = 0.0;
    for (double p : partial) total = std::max(total, p);
    return total;
}

}  // namespace hslab
