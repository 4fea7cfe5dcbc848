#pragma once

#include <cstddef>
#include <vector>

namespace dd {

/// Square matrix in compressed-row layout with sorted column indices.
struct CsrMatrix {
    std::size_t n{0};
    std::vector<std::size_t> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> vals;

    std::size_t nnz() const { return vals.size(); }
    /// y = M x, rows in parallel; each row is summed in column order.
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> diagonal() const;
    double entry(std::size_t i, std::size_t j) const;
    /// Largest |M_ij - M_ji| over the stored pattern (0 for an exactly symmetric matrix).
    double max_asymmetry() const;

    /// Builds from row-major dense storage, dropping zeros. Intended for small tests.
    static CsrMatrix from_dense(const std::vector<std::vector<double>>& rows);
    static CsrMatrix identity(std::size_t n);
};

}  // namespace dd
