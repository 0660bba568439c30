#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace dcu::par {

// Thread count used by all OpenMP regions in this library.
// Resolution order: explicit set_thread_count() > DCU_THREADS env var > OpenMP default.
void set_thread_count(int k);
int thread_count();

// Fixed block width for deterministic reductions. Every reduction below
// accumulates serially inside each block (in index order) and then combines
// the per-block partials serially in block order. The arithmetic is therefore
// a pure function of the block width, never of the thread count or schedule,
// which is what makes reruns bit-identical at any --threads value.
inline constexpr std::size_t kReduceBlock = 4096;

inline std::size_t block_count(std::size_t n) {
    return (n + kReduceBlock - 1) / kReduceBlock;
}

// Sum of term(i) for i in [0, n).
template <typename Term>
double block_sum(std::size_t n, Term&& term) {
    if (n == 0) return 0.0;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < (std::int64_t)nb; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        partial[(std::size_t)b] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// K-component structured reduction: accum(i, acc) adds index i's contribution
// into acc[0..K). Used for Gram matrices, moment pairs, weighted tallies.
template <typename Accum>
std::vector<double> block_reduce(std::size_t n, std::size_t K, Accum&& accum) {
    std::vector<double> total(K, 0.0);
    if (n == 0) return total;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb * K, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < (std::int64_t)nb; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double* acc = partial.data() + (std::size_t)b * K;
        for (std::size_t i = lo; i < hi; ++i) accum(i, acc);
    }
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t k = 0; k < K; ++k) total[k] += partial[b * K + k];
    return total;
}

// Max of term(i) over [0, n); -inf on empty. Max is order-insensitive but the
// blocked pattern is kept so every reduction in the library reads the same.
template <typename Term>
double block_max(std::size_t n, Term&& term) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (n == 0) return neg_inf;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, neg_inf);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < (std::int64_t)nb; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double m = neg_inf;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
        partial[(std::size_t)b] = m;
    }
    double total = neg_inf;
    for (double p : partial) total = std::max(total, p);
    return total;
}

// Elementwise parallel loop, no cross-index state. body(i) writes only to
// locations owned by index i.
template <typename Body>
void for_each_index(std::size_t n, Body&& body) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < (std::int64_t)n; ++i) body((std::size_t)i);
}

// Deterministic gather: emit(i, out) may push items for index i. Per-block
// vectors are concatenated in block order, so the result ordering is
// reproducible across thread counts.
template <typename T, typename Emit>
std::vector<T> block_collect(std::size_t n, Emit&& emit) {
    const std::size_t nb = block_count(n);
    std::vector<std::vector<T>> per_block(nb);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < (std::int64_t)nb; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        for (std::size_t i = lo; i < hi; ++i) emit(i, per_block[(std::size_t)b]);
    }
    std::vector<T> out;
    for (auto& v : per_block) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Mean and standard error of term(i), both from deterministic blocked sums.
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

template <typename Term>
MeanSE block_mean_se(std::size_t n, Term&& term) {
    auto sums = block_reduce(n, 2, [&](std::size_t i, double* acc) {
        const double v = term(i);
        acc[0] += v;
        acc[1] += v * v;
    });
    MeanSE r;
    if (n == 0) return r;
    r.mean = sums[0] / (double)n;
    if (n > 1) {
        const double var = (sums[1] - (double)n * r.mean * r.mean) / ((double)n - 1.0);
        r.se = var > 0.0 ? std::sqrt(var / (double)n) : 0.0;
    }
    return r;
}

} // namespace dcu::par
