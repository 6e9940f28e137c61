#ifndef BAMG_CORE_GALERKIN_HPP
#define BAMG_CORE_GALERKIN_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bamg/core/interp_operator.hpp"
#include "bamg/core/sparse_matrix.hpp"

namespace bamg {

/// Galerkin triple product A_c = P' A P. Entries below 1e-13 * max|entry|
/// are dropped (pairwise, so the stored pattern stays symmetric when A is
/// symmetric); diagonal entries are always kept.
inline SparseMatrix galerkin_product(const SparseMatrix& A, const InterpOperator& P) {
    if (P.n_fine != A.n) throw std::invalid_argument("galerkin_product: dimension mismatch");
    const index_t nc = P.n_coarse;

    // Transpose of P, rows become coarse indices.
    std::vector<std::vector<std::pair<index_t, real_t>>> pt(static_cast<std::size_t>(nc));
    for (index_t i = 0; i < P.n_fine; ++i)
        for (index_t k = P.row_starts[i]; k < P.row_starts[i + 1]; ++k)
            pt[P.cols[k]].push_back({i, P.weights[k]});

    // Row I of A_c = sum_{i in col I of P} P(i,I) * (A P)(i,:), accumulated
    // with a dense workspace over coarse columns.
    std::vector<real_t> work(static_cast<std::size_t>(nc), 0.0);
    std::vector<index_t> marker(static_cast<std::size_t>(nc), -1);
    std::vector<std::vector<std::pair<index_t, real_t>>> rows(static_cast<std::size_t>(nc));
    real_t max_abs = 0.0;
    for (index_t I = 0; I < nc; ++I) {
        std::vector<index_t> touched;
        for (auto [i, piI] : pt[I]) {
            for (index_t ka = A.row_starts[i]; ka < A.row_starts[i + 1]; ++ka) {
                const index_t j = A.col_indices[ka];
                const real_t aij = A.values[ka];
                for (index_t kp = P.row_starts[j]; kp < P.row_starts[j + 1]; ++kp) {
                    const index_t J = P.cols[kp];
                    if (marker[J] != I) {
                        marker[J] = I;
                        work[J] = 0.0;
                        touched.push_back(J);
                    }
                    work[J] += piI * aij * P.weights[kp];
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = rows[I];
        row.reserve(touched.size());
        for (index_t J : touched) {
            row.push_back({J, work[J]});
            max_abs = std::max(max_abs, std::fabs(work[J]));
        }
    }

    const real_t drop = 1e-13 * max_abs;
    auto keep = [&](index_t I, index_t J, real_t v) {
        if (I == J) return true;
        if (std::fabs(v) >= drop) return true;
        // pairwise rule: keep if the mirrored entry is above the threshold
        const auto& mirror = rows[J];
        auto it = std::lower_bound(mirror.begin(), mirror.end(), I,
                                   [](const auto& a, index_t b) { return a.first < b; });
        return it != mirror.end() && it->first == I && std::fabs(it->second) >= drop;
    };

    SparseMatrix Ac;
    Ac.n = nc;
    Ac.symmetric_hint = A.symmetric_hint;
    Ac.row_starts.assign(static_cast<std::size_t>(nc) + 1, 0);
    for (index_t I = 0; I < nc; ++I) {
        for (auto [J, v] : rows[I]) {
            if (!keep(I, J, v)) continue;
            Ac.col_indices.push_back(J);
            Ac.values.push_back(v);
            Ac.row_starts[static_cast<std::size_t>(I) + 1]++;
        }
    }
    for (index_t I = 0; I < nc; ++I) Ac.row_starts[I + 1] += Ac.row_starts[I];
    return Ac;
}

} // namespace bamg

#endif
