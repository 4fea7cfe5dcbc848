#include "dd/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "dd/error.hpp"

namespace dd {

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    DD_REQUIRE(x.size() == n, "vector size does not match the matrix");
    y.resize(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = entry(i, i);
    return d;
}

double CsrMatrix::entry(std::size_t i, std::size_t j) const {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<int>(j));
    if (it == last || *it != static_cast<int>(j)) return 0.0;
    return vals[static_cast<std::size_t>(it - cols.begin())];
}

double CsrMatrix::max_asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            worst = std::max(worst, std::abs(vals[k] - entry(static_cast<std::size_t>(cols[k]), i)));
    return worst;
}

CsrMatrix CsrMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
    CsrMatrix m;
    m.n = rows.size();
    for (const auto& r : rows) {
        DD_REQUIRE(r.size() == m.n, "dense matrix must be square");
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j] != 0.0) {
                m.cols.push_back(static_cast<int>(j));
                m.vals.push_back(r[j]);
            }
        }
        m.row_ptr.push_back(m.vals.size());
    }
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix m;
    m.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        m.cols.push_back(static_cast<int>(i));
        m.vals.push_back(1.0);
        m.row_ptr.push_back(i + 1);
    }
    return m;
}

}  // namespace dd
