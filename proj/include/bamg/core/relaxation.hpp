#ifndef BAMG_CORE_RELAXATION_HPP
#define BAMG_CORE_RELAXATION_HPP

#include <stdexcept>

#include "bamg/core/cf_split.hpp"
#include "bamg/core/sparse_matrix.hpp"

namespace bamg {

/// One forward Gauss-Seidel sweep in lexicographic row order, in place:
/// x_i <- (b_i - sum_{j != i} a_ij x_j) / a_ii using the freshest values.
/// The error propagation operator is I - L^{-1} A with L the lower triangle.
inline void gauss_seidel_sweep(const SparseMatrix& A, DenseVector& x, const DenseVector& b) {
    if (static_cast<index_t>(x.size()) != A.n || static_cast<index_t>(b.size()) != A.n)
        throw std::invalid_argument("gauss_seidel_sweep: dimension mismatch");
    for (index_t i = 0; i < A.n; ++i) {
        real_t s = b[i];
        real_t d = 0.0;
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k) {
            const index_t j = A.col_indices[k];
            if (j == i)
                d = A.values[k];
            else
                s -= A.values[k] * x[j];
        }
        if (d == 0.0) throw std::runtime_error("gauss_seidel_sweep: zero diagonal");
        x[i] = s / d;
    }
}

/// Gauss-Seidel applied only at F rows of the homogeneous system (b = 0);
/// C entries of u are left untouched. This realizes the F-relaxation
/// u_f <- (I - M_ff^{-1} B_ff) u_f when the C entries are zero.
inline void f_relaxation_sweep(const SparseMatrix& A, const CFSplit& split, DenseVector& u) {
    if (static_cast<index_t>(u.size()) != A.n || split.n() != A.n)
        throw std::invalid_argument("f_relaxation_sweep: dimension mismatch");
    for (index_t i = 0; i < A.n; ++i) {
        if (split.is_coarse[i]) continue;
        real_t s = 0.0;
        real_t d = 0.0;
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k) {
            const index_t j = A.col_indices[k];
            if (j == i)
                d = A.values[k];
            else
                s -= A.values[k] * u[j];
        }
        if (d == 0.0) throw std::runtime_error("f_relaxation_sweep: zero diagonal at F row");
        u[i] = s / d;
    }
}

} // namespace bamg

#endif
