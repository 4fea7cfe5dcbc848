#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dd {

/// Sets the OpenMP team size for subsequent parallel regions (n <= 0 keeps the default).
void set_threads(int n);
int max_threads();

/// Entries per reduction block. Block sums are sequential and blocks are combined
/// by a fixed pairwise tree, so the result does not depend on the thread count.
inline constexpr std::size_t kReductionBlock = 1024;

/// Pairwise tree sum of v, in place (v is clobbered).
double pairwise_sum(std::vector<double>& v);

/// sum_i f(i) for i in [0, n), bit-identical for any number of threads.
template <class F>
double deterministic_reduce(std::size_t n, F&& f) {
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[b] = s;
    }
    return pairwise_sum(partial);
}

/// Component-wise deterministic sum of an array-valued f(i).
template <std::size_t N, class F>
std::array<double, N> deterministic_reduce_n(std::size_t n, F&& f) {
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<std::array<double, N>> partial(blocks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
        std::array<double, N> s{};
        for (std::size_t i = lo; i < hi; ++i) {
            const std::array<double, N> v = f(i);
            for (std::size_t c = 0; c < N; ++c) s[c] += v[c];
        }
        partial[b] = s;
    }
    std::array<double, N> out{};
    std::vector<double> col(blocks);
    for (std::size_t c = 0; c < N; ++c) {
        for (std::size_t b = 0; b < blocks; ++b) col[b] = partial[b][c];
        out[c] = pairwise_sum(col);
    }
    return out;
}

double deterministic_dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dd
