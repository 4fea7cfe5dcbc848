#include "dd/parallel.hpp"

#include <omp.h>

#include "dd/error.hpp"

namespace dd {

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

double pairwise_sum(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2 == 1) {
            v[half] = v[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return v[0];
}

double deterministic_dot(const std::vector<double>& a, const std::vector<double>& b) {
    DD_REQUIRE(a.size() == b.size(), "vector sizes differ");
    return deterministic_reduce(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

}  // namespace dd
