#ifndef BAMG_CORE_INTERP_OPERATOR_HPP
#define BAMG_CORE_INTERP_OPERATOR_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bamg/core/cf_split.hpp"
#include "bamg/core/types.hpp"

namespace bamg {

/// Sparse prolongation P (n_fine x n_coarse) stored row-wise. Rows belonging
/// to C vertices are unit rows; F rows hold the least-squares interpolation
/// weights. fitness records the final LS value per row (0 on C rows,
/// +inf where no coarse neighborhood was available).
struct InterpOperator {
    index_t n_fine = 0;
    index_t n_coarse = 0;
    std::vector<index_t> row_starts;      // length n_fine+1
    std::vector<index_t> cols;            // coarse column indices, sorted per row
    std::vector<real_t> weights;
    std::vector<real_t> fitness;          // length n_fine
    std::vector<index_t> caliber_used;    // length n_fine, 0 on C rows
    std::vector<index_t> coarse_to_fine;  // column J -> fine vertex index

    index_t nnz() const { return static_cast<index_t>(cols.size()); }

    /// Identity prolongation (n_coarse = n_fine).
    static InterpOperator identity(index_t n) {
        InterpOperator P;
        P.n_fine = P.n_coarse = n;
        P.row_starts.resize(static_cast<std::size_t>(n) + 1);
        P.cols.resize(static_cast<std::size_t>(n));
        P.weights.assign(static_cast<std::size_t>(n), 1.0);
        P.fitness.assign(static_cast<std::size_t>(n), 0.0);
        P.caliber_used.assign(static_cast<std::size_t>(n), 0);
        P.coarse_to_fine.resize(static_cast<std::size_t>(n));
        for (index_t i = 0; i <= n; ++i) P.row_starts[i] = i;
        for (index_t i = 0; i < n; ++i) {
            P.cols[i] = i;
            P.coarse_to_fine[i] = i;
        }
        return P;
    }

    /// Checks the interpolation invariants against a split: unit rows on C,
    /// finite weights, per-row nonzeros bounded by the caliber.
    void validate(const CFSplit& split, index_t caliber) const {
        if (split.n() != n_fine) throw std::invalid_argument("InterpOperator: split size mismatch");
        if (static_cast<index_t>(split.c_indices.size()) != n_coarse)
            throw std::invalid_argument("InterpOperator: |C| != n_coarse");
        for (index_t J = 0; J < n_coarse; ++J)
            if (coarse_to_fine[J] != split.c_indices[J])
                throw std::invalid_argument("InterpOperator: coarse_to_fine mismatch");
        for (index_t i = 0; i < n_fine; ++i) {
            const index_t len = row_starts[i + 1] - row_starts[i];
            if (split.is_coarse[i]) {
                if (len != 1 || weights[row_starts[i]] != 1.0 ||
                    coarse_to_fine[cols[row_starts[i]]] != i)
                    throw std::invalid_argument("InterpOperator: C row is not a unit row");
            } else {
                if (len > caliber)
                    throw std::invalid_argument("InterpOperator: row exceeds caliber");
                for (index_t k = row_starts[i]; k < row_starts[i + 1]; ++k)
                    if (!std::isfinite(weights[k]))
                        throw std::invalid_argument("InterpOperator: non-finite weight");
            }
        }
    }
};

} // namespace bamg

#endif
