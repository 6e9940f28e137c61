#ifndef BAMG_CORE_SPARSE_MATRIX_HPP
#define BAMG_CORE_SPARSE_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bamg/core/dense.hpp"
#include "bamg/core/types.hpp"

namespace bamg {

/// Square sparse matrix in compressed sparse row form. Column indices are
/// strictly increasing within each row and every row stores its diagonal
/// entry (Gauss-Seidel and the residual-corrected LS targets divide by it).
struct SparseMatrix {
    index_t n = 0;
    std::vector<index_t> row_starts; // length n+1
    std::vector<index_t> col_indices;
    std::vector<real_t> values;
    bool symmetric_hint = false;

    index_t nnz() const { return static_cast<index_t>(col_indices.size()); }

    std::span<const index_t> row_cols(index_t i) const {
        return {col_indices.data() + row_starts[i],
                static_cast<std::size_t>(row_starts[i + 1] - row_starts[i])};
    }
    std::span<const real_t> row_vals(index_t i) const {
        return {values.data() + row_starts[i],
                static_cast<std::size_t>(row_starts[i + 1] - row_starts[i])};
    }

    /// Stored value at (i,j), or 0 if the entry is not stored.
    real_t at(index_t i, index_t j) const {
        auto cols = row_cols(i);
        auto it = std::lower_bound(cols.begin(), cols.end(), j);
        if (it == cols.end() || *it != j) return 0.0;
        return values[row_starts[i] + static_cast<index_t>(it - cols.begin())];
    }

    real_t diag(index_t i) const { return at(i, i); }

    /// Checks the CSR invariants; throws std::invalid_argument on violation.
    void validate() const {
        if (static_cast<index_t>(row_starts.size()) != n + 1)
            throw std::invalid_argument("SparseMatrix: row_starts length != n+1");
        if (row_starts.front() != 0 || row_starts.back() != nnz())
            throw std::invalid_argument("SparseMatrix: row_starts endpoints wrong");
        for (index_t i = 0; i < n; ++i) {
            if (row_starts[i] > row_starts[i + 1])
                throw std::invalid_argument("SparseMatrix: row_starts not nondecreasing");
            bool has_diag = false;
            index_t prev = -1;
            for (index_t k = row_starts[i]; k < row_starts[i + 1]; ++k) {
                index_t j = col_indices[k];
                if (j < 0 || j >= n)
                    throw std::invalid_argument("SparseMatrix: column out of range");
                if (j <= prev)
                    throw std::invalid_argument("SparseMatrix: columns not strictly increasing");
                if (!std::isfinite(values[k]))
                    throw std::invalid_argument("SparseMatrix: non-finite value");
                if (j == i) {
                    if (values[k] == 0.0)
                        throw std::invalid_argument("SparseMatrix: zero diagonal at row " +
                                                    std::to_string(i));
                    has_diag = true;
                }
                prev = j;
            }
            if (!has_diag)
                throw std::invalid_argument("SparseMatrix: missing diagonal at row " +
                                            std::to_string(i));
        }
        if (symmetric_hint) {
            for (index_t i = 0; i < n; ++i) {
                for (index_t k = row_starts[i]; k < row_starts[i + 1]; ++k) {
                    const index_t j = col_indices[k];
                    const real_t a_ij = values[k];
                    const real_t a_ji = at(j, i);
                    const real_t s = std::max(std::fabs(a_ij), std::fabs(a_ji));
                    if (std::fabs(a_ij - a_ji) > 1e-12 * std::max(s, real_t(1)))
                        throw std::invalid_argument("SparseMatrix: symmetric_hint violated at (" +
                                                    std::to_string(i) + "," + std::to_string(j) +
                                                    ")");
                }
            }
        }
    }
};

/// Builds a SparseMatrix from (row, col, value) triplets. Duplicate entries
/// are summed; entries that sum to exactly zero are kept only on the diagonal.
inline SparseMatrix matrix_from_triplets(index_t n,
                                         std::vector<std::tuple<index_t, index_t, real_t>> trips,
                                         bool symmetric_hint = false) {
    std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseMatrix A;
    A.n = n;
    A.symmetric_hint = symmetric_hint;
    A.row_starts.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t k = 0;
    while (k < trips.size()) {
        auto [i, j, v] = trips[k];
        std::size_t k2 = k + 1;
        while (k2 < trips.size() && std::get<0>(trips[k2]) == i && std::get<1>(trips[k2]) == j) {
            v += std::get<2>(trips[k2]);
            ++k2;
        }
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw std::invalid_argument("matrix_from_triplets: index out of range");
        if (v != 0.0 || i == j) {
            A.col_indices.push_back(j);
            A.values.push_back(v);
            A.row_starts[static_cast<std::size_t>(i) + 1]++;
        }
        k = k2;
    }
    std::partial_sum(A.row_starts.begin(), A.row_starts.end(), A.row_starts.begin());
    return A;
}

inline SparseMatrix identity_matrix(index_t n) {
    SparseMatrix A;
    A.n = n;
    A.symmetric_hint = true;
    A.row_starts.resize(static_cast<std::size_t>(n) + 1);
    A.col_indices.resize(static_cast<std::size_t>(n));
    A.values.assign(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) A.row_starts[i] = i;
    for (index_t i = 0; i < n; ++i) A.col_indices[i] = i;
    return A;
}

inline DenseVector spmv(const SparseMatrix& A, const DenseVector& x) {
    if (static_cast<index_t>(x.size()) != A.n)
        throw std::invalid_argument("spmv: dimension mismatch");
    DenseVector y(static_cast<std::size_t>(A.n), 0.0);
    for (index_t i = 0; i < A.n; ++i) {
        real_t s = 0.0;
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k)
            s += A.values[k] * x[A.col_indices[k]];
        y[i] = s;
    }
    return y;
}

/// Energy norm sqrt(x'Ax). Small negative quadratic forms from rounding are
/// clamped to zero; anything beyond the tolerance signals a non-SPD input.
inline real_t a_norm(const SparseMatrix& A, const DenseVector& x) {
    const DenseVector ax = spmv(A, x);
    real_t q = dot(x, ax);
    if (q < 0.0) {
        real_t scale = 0.0;
        for (index_t i = 0; i < A.n; ++i) scale += std::fabs(A.diag(i)) * x[i] * x[i];
        if (q < -1e-12 * std::max(real_t(1), scale))
            throw std::runtime_error("a_norm: negative quadratic form (matrix not SPD?)");
        q = 0.0;
    }
    return std::sqrt(q);
}

} // namespace bamg

#endif
