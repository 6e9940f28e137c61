#ifndef BAMG_SETUP_LS_INTERP_HPP
#define BAMG_SETUP_LS_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bamg/core/cf_split.hpp"
#include "bamg/core/interp_operator.hpp"
#include "bamg/setup/ls_fit.hpp"

namespace bamg {

struct InterpSearchParams {
    index_t caliber = 4;       // max |C_i| per F row
    index_t search_depth = 4;  // d_LS ring for coarse candidates
    real_t gamma = 1.5;        // sparsity penalty exponent factor
    index_t max_candidates = 12;
    real_t truncation = 0.15;  // drop row entries below this fraction of the row max

    void validate() const {
        if (caliber < 1) throw std::invalid_argument("InterpSearchParams: caliber must be >= 1");
        if (search_depth < 1)
            throw std::invalid_argument("InterpSearchParams: search_depth must be >= 1");
        if (!(gamma > 1.0)) throw std::invalid_argument("InterpSearchParams: gamma must be > 1");
        if (max_candidates < 1)
            throw std::invalid_argument("InterpSearchParams: max_candidates must be >= 1");
        if (!(truncation >= 0.0 && truncation < 1.0))
            throw std::invalid_argument("InterpSearchParams: truncation must be in [0,1)");
    }
};

/// C vertices within graph distance d_ls of i in the adjacency of A, sorted.
/// An empty result marks an isolated F vertex; the caller falls back to a
/// zero interpolation row.
inline std::vector<index_t> coarse_neighborhood(const SparseMatrix& A, const CFSplit& split,
                                                index_t i, index_t d_ls) {
    if (split.is_coarse[i])
        throw std::invalid_argument("coarse_neighborhood: vertex is not in F");
    std::vector<index_t> out;
    std::vector<char> seen(static_cast<std::size_t>(A.n), 0);
    std::vector<index_t> frontier{i}, next;
    seen[i] = 1;
    for (index_t lv = 0; lv < d_ls && !frontier.empty(); ++lv) {
        next.clear();
        for (index_t u : frontier) {
            for (index_t j : A.row_cols(u)) {
                if (seen[j]) continue;
                seen[j] = 1;
                next.push_back(j);
                if (split.is_coarse[j]) out.push_back(j);
            }
        }
        frontier.swap(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct InterpolatorySet {
    std::vector<index_t> coarse;      // chosen C_i, sorted by vertex index
    std::vector<real_t> coefficients; // aligned with coarse
    real_t ls_value = std::numeric_limits<real_t>::infinity();
    index_t pool_size = 0;
};

namespace detail {

/// Lexicographic combination enumerator over indices 0..pool-1.
inline bool next_combination(std::vector<index_t>& idx, index_t pool) {
    const index_t m = static_cast<index_t>(idx.size());
    index_t t = m - 1;
    while (t >= 0 && idx[t] == pool - m + t) --t;
    if (t < 0) return false;
    ++idx[t];
    for (index_t s = t + 1; s < m; ++s) idx[s] = idx[s - 1] + 1;
    return true;
}

} // namespace detail

/// Greedy interpolatory-set search: ranks the d_LS-ring coarse neighborhood
/// by one-point algebraic distance, keeps the top max_candidates, and
/// enumerates subsets of the kept pool by increasing cardinality. A larger
/// set replaces the incumbent only when its LS value passes the sparsity
/// penalty nls'' < (nls')^(gamma * (|W''| - |W'|)), where nls values are
/// normalized by the best one-point LS value of the row (clamped to
/// [1e-16, 1)). Finally, row entries below truncation * max|p| are dropped
/// and the reduced fit re-solved.
inline InterpolatorySet select_interpolatory_set(const LsFitData& d, const CFSplit& split,
                                                 index_t i, const InterpSearchParams& params) {
    params.validate();
    InterpolatorySet result;
    std::vector<index_t> nbhd = coarse_neighborhood(*d.A, split, i, params.search_depth);
    result.pool_size = static_cast<index_t>(nbhd.size());
    if (nbhd.empty()) return result; // zero row, infinite fitness

    // Rank candidates by one-point distance (descending, ties to low index).
    std::vector<std::pair<real_t, index_t>> ranked;
    ranked.reserve(nbhd.size());
    for (index_t j : nbhd) ranked.push_back({algebraic_distance(d, i, j), j});
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const index_t pool_n = std::min<index_t>(params.max_candidates,
                                             static_cast<index_t>(ranked.size()));
    std::vector<index_t> pool(static_cast<std::size_t>(pool_n));
    for (index_t t = 0; t < pool_n; ++t) pool[t] = ranked[t].second;
    std::sort(pool.begin(), pool.end()); // canonical enumeration order

    const real_t floor = distance_floor(d, i);
    const real_t nls_hi = std::nextafter(real_t(1), real_t(0));
    const index_t max_card = std::min({params.caliber, pool_n, d.k()});

    std::vector<index_t> incumbent;
    std::vector<real_t> incumbent_p;
    real_t incumbent_ls = std::numeric_limits<real_t>::infinity();
    real_t base = 0.0; // best singleton LS, the normalization scale

    std::vector<index_t> subset, best_subset;
    std::vector<index_t> w_buf;
    for (index_t m = 1; m <= max_card; ++m) {
        // Best subset of cardinality m (lexicographic order, strict <).
        real_t best_ls = std::numeric_limits<real_t>::infinity();
        std::vector<real_t> best_p;
        subset.resize(static_cast<std::size_t>(m));
        for (index_t t = 0; t < m; ++t) subset[t] = t;
        do {
            w_buf.clear();
            for (index_t t : subset) w_buf.push_back(pool[t]);
            LsSetFit fit = ls_fit_set(d, i, w_buf);
            if (fit.ls_value < best_ls) {
                best_ls = fit.ls_value;
                best_p = std::move(fit.coefficients);
                best_subset = w_buf;
            }
        } while (detail::next_combination(subset, pool_n));

        if (m == 1) {
            incumbent = best_subset;
            incumbent_p = best_p;
            incumbent_ls = best_ls;
            base = std::max(best_ls, floor);
            if (best_ls <= floor) break; // exact one-point fit, never replaced
        } else {
            auto nls = [&](real_t ls) {
                return std::min(std::max(ls / base, real_t(1e-16)), nls_hi);
            };
            const real_t exponent =
                params.gamma * static_cast<real_t>(m - static_cast<index_t>(incumbent.size()));
            if (nls(best_ls) < std::pow(nls(incumbent_ls), exponent)) {
                incumbent = best_subset;
                incumbent_p = best_p;
                incumbent_ls = best_ls;
            }
        }
    }

    // Truncate negligible entries and re-solve on the reduced set.
    if (params.truncation > 0.0 && incumbent.size() > 1) {
        real_t pmax = 0.0;
        for (real_t p : incumbent_p) pmax = std::max(pmax, std::fabs(p));
        std::vector<index_t> kept;
        for (std::size_t t = 0; t < incumbent.size(); ++t)
            if (std::fabs(incumbent_p[t]) >= params.truncation * pmax)
                kept.push_back(incumbent[t]);
        if (kept.size() < incumbent.size() && !kept.empty()) {
            LsSetFit fit = ls_fit_set(d, i, kept);
            incumbent = std::move(kept);
            incumbent_p = std::move(fit.coefficients);
            incumbent_ls = fit.ls_value;
        }
    }

    result.coarse = std::move(incumbent);
    result.coefficients = std::move(incumbent_p);
    result.ls_value = incumbent_ls;
    return result;
}

/// Builds the full prolongation: unit rows on C, a greedy LS row per F
/// vertex. F vertices with an empty coarse neighborhood get a zero row and
/// infinite fitness; their indices are collected in empty_rows.
struct InterpBuildResult {
    InterpOperator P;
    std::vector<index_t> empty_rows;
};

inline InterpBuildResult assemble_interpolation(const LsFitData& d, const CFSplit& split,
                                                const InterpSearchParams& params) {
    params.validate();
    split.validate();
    const index_t n = d.n();
    std::vector<index_t> fine_to_coarse(static_cast<std::size_t>(n), -1);
    for (index_t J = 0; J < static_cast<index_t>(split.c_indices.size()); ++J)
        fine_to_coarse[split.c_indices[J]] = J;

    InterpBuildResult out;
    InterpOperator& P = out.P;
    P.n_fine = n;
    P.n_coarse = static_cast<index_t>(split.c_indices.size());
    P.coarse_to_fine = split.c_indices;
    P.row_starts.assign(static_cast<std::size_t>(n) + 1, 0);
    P.fitness.assign(static_cast<std::size_t>(n), 0.0);
    P.caliber_used.assign(static_cast<std::size_t>(n), 0);

    for (index_t i = 0; i < n; ++i) {
        if (split.is_coarse[i]) {
            P.cols.push_back(fine_to_coarse[i]);
            P.weights.push_back(1.0);
        } else {
            InterpolatorySet sel = select_interpolatory_set(d, split, i, params);
            if (sel.coarse.empty()) {
                out.empty_rows.push_back(i);
                P.fitness[i] = std::numeric_limits<real_t>::infinity();
            } else {
                for (std::size_t t = 0; t < sel.coarse.size(); ++t) {
                    P.cols.push_back(fine_to_coarse[sel.coarse[t]]);
                    P.weights.push_back(sel.coefficients[t]);
                }
                P.fitness[i] = sel.ls_value;
                P.caliber_used[i] = static_cast<index_t>(sel.coarse.size());
            }
        }
        P.row_starts[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(P.cols.size());
    }
    return out;
}

inline InterpBuildResult assemble_interpolation(const SparseMatrix& A, const TestVectorSet& tvs,
                                                const CFSplit& split,
                                                const InterpSearchParams& params,
                                                LsForm form = LsForm::residual_corrected) {
    const LsFitData d = make_ls_fit_data(A, tvs, form);
    return assemble_interpolation(d, split, params);
}

} // namespace bamg

#endif
