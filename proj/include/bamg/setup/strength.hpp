#ifndef BAMG_SETUP_STRENGTH_HPP
#define BAMG_SETUP_STRENGTH_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "bamg/setup/ls_fit.hpp"

namespace bamg {

/// Depth-d neighborhoods of the graph of A: for each vertex the sorted list
/// of vertices reachable within d edges (self excluded), together with the
/// hop distance at which each neighbor is first reached. Equivalent to the
/// off-diagonal pattern of A^d, but obtained by traversal; the power is
/// never formed.
struct NeighborhoodGraph {
    index_t depth = 1;
    std::vector<std::vector<index_t>> neighbors; // sorted per vertex
    std::vector<std::vector<index_t>> hops;      // aligned with neighbors
};

inline NeighborhoodGraph neighborhood_graph(const SparseMatrix& A, index_t depth) {
    if (depth < 1) throw std::invalid_argument("neighborhood_graph: depth must be >= 1");
    NeighborhoodGraph g;
    g.depth = depth;
    g.neighbors.resize(static_cast<std::size_t>(A.n));
    g.hops.resize(static_cast<std::size_t>(A.n));
    std::vector<index_t> level(static_cast<std::size_t>(A.n), -1);
    std::vector<index_t> frontier, next;
    for (index_t i = 0; i < A.n; ++i) {
        std::vector<index_t> visited;
        level[i] = 0;
        visited.push_back(i);
        frontier.assign(1, i);
        for (index_t lv = 1; lv <= depth && !frontier.empty(); ++lv) {
            next.clear();
            for (index_t u : frontier) {
                for (index_t j : A.row_cols(u)) {
                    if (level[j] >= 0) continue;
                    level[j] = lv;
                    visited.push_back(j);
                    next.push_back(j);
                }
            }
            frontier.swap(next);
        }
        std::sort(visited.begin(), visited.end());
        auto& nb = g.neighbors[i];
        auto& hp = g.hops[i];
        nb.reserve(visited.size() - 1);
        hp.reserve(visited.size() - 1);
        for (index_t j : visited) {
            if (j != i) {
                nb.push_back(j);
                hp.push_back(level[j]);
            }
            level[j] = -1; // reset for the next source
        }
    }
    return g;
}

/// Algebraic distances r_ij for every vertex i and each depth-d neighbor,
/// aligned with the NeighborhoodGraph adjacency. The values depend only on
/// (A, tvs), so one cache serves all coarsening stages.
struct AlgebraicDistanceCache {
    const NeighborhoodGraph* graph = nullptr;
    std::vector<std::vector<real_t>> r; // r[i] aligned with graph->neighbors[i]
};

inline AlgebraicDistanceCache make_distance_cache(const LsFitData& d,
                                                  const NeighborhoodGraph& g) {
    AlgebraicDistanceCache cache;
    cache.graph = &g;
    cache.r.resize(g.neighbors.size());
    for (index_t i = 0; i < static_cast<index_t>(g.neighbors.size()); ++i) {
        const auto& nb = g.neighbors[i];
        auto& ri = cache.r[i];
        ri.resize(nb.size());
        for (std::size_t t = 0; t < nb.size(); ++t) ri[t] = algebraic_distance(d, i, nb[t]);
    }
    return cache;
}

/// Strength graph M^d: for each F vertex i, the depth-d neighbors j in F
/// whose algebraic distance passes the relative threshold
/// r_ij > theta_ad * max_k r_ik (strict, max over the F neighbors of i).
/// Edges carry r_ij and the hop distance of j from i.
struct StrengthGraph {
    struct Edge {
        index_t to;
        real_t r;
        index_t hops;
    };
    index_t depth = 1;
    real_t theta_ad = 0.5;
    std::vector<std::vector<Edge>> edges; // size n; populated only for F vertices
    std::vector<char> in_f;               // restriction mask

    index_t n() const { return static_cast<index_t>(edges.size()); }
};

inline StrengthGraph build_strength_graph_cached(const AlgebraicDistanceCache& cache,
                                                 const std::vector<char>& f_mask, real_t theta_ad) {
    if (!(theta_ad > 0.0 && theta_ad < 1.0))
        throw std::invalid_argument("build_strength_graph: theta_ad must be in (0,1)");
    const NeighborhoodGraph& g = *cache.graph;
    StrengthGraph m;
    m.depth = g.depth;
    m.theta_ad = theta_ad;
    m.in_f = f_mask;
    m.edges.resize(g.neighbors.size());
    for (index_t i = 0; i < static_cast<index_t>(g.neighbors.size()); ++i) {
        if (!f_mask[i]) continue;
        const auto& nb = g.neighbors[i];
        const auto& ri = cache.r[i];
        real_t rmax = 0.0;
        for (std::size_t t = 0; t < nb.size(); ++t)
            if (f_mask[nb[t]]) rmax = std::max(rmax, ri[t]);
        if (rmax == 0.0) continue;
        auto& out = m.edges[i];
        for (std::size_t t = 0; t < nb.size(); ++t) {
            if (!f_mask[nb[t]]) continue;
            if (ri[t] > theta_ad * rmax) out.push_back({nb[t], ri[t], g.hops[i][t]});
        }
    }
    return m;
}

/// Convenience entry point building the neighborhood and distances on the fly.
inline StrengthGraph build_strength_graph(const LsFitData& d, const std::vector<char>& f_mask,
                                          index_t depth, real_t theta_ad) {
    const NeighborhoodGraph g = neighborhood_graph(*d.A, depth);
    const AlgebraicDistanceCache cache = make_distance_cache(d, g);
    return build_strength_graph_cached(cache, f_mask, theta_ad);
}

inline StrengthGraph build_strength_graph(const LsFitData& d, const std::vector<index_t>& f_set,
                                          index_t depth, real_t theta_ad) {
    std::vector<char> mask(static_cast<std::size_t>(d.n()), 0);
    for (index_t i : f_set) mask[i] = 1;
    return build_strength_graph(d, mask, depth, theta_ad);
}

/// Classical strength of connection S_i = { j : -a_ij >= theta * max_{k != i}(-a_ik) }
/// plus the transpose sets. Rows whose strongest coupling is nonnegative get
/// an empty S_i.
struct ClassicalStrength {
    std::vector<std::vector<index_t>> s;   // S_i, sorted
    std::vector<std::vector<index_t>> s_t; // transpose sets, sorted
};

inline ClassicalStrength classical_strength(const SparseMatrix& A, real_t theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("classical_strength: theta must be in (0,1]");
    ClassicalStrength cs;
    cs.s.resize(static_cast<std::size_t>(A.n));
    cs.s_t.resize(static_cast<std::size_t>(A.n));
    for (index_t i = 0; i < A.n; ++i) {
        real_t max_neg = 0.0;
        bool has_off = false;
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k) {
            if (A.col_indices[k] == i) continue;
            has_off = true;
            max_neg = std::max(max_neg, -A.values[k]);
        }
        if (!has_off || max_neg <= 0.0) continue;
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k) {
            const index_t j = A.col_indices[k];
            if (j == i) continue;
            if (-A.values[k] >= theta * max_neg) {
                cs.s[i].push_back(j);
                cs.s_t[j].push_back(i);
            }
        }
    }
    for (auto& v : cs.s_t) std::sort(v.begin(), v.end());
    return cs;
}

/// Writes the surviving edges as "i j r_ij" lines (0-based) for inspection.
inline void write_edge_list(const StrengthGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_edge_list: cannot open " + path);
    char buf[96];
    for (index_t i = 0; i < g.n(); ++i) {
        for (const auto& e : g.edges[i]) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, e.to, e.r);
            out << buf;
        }
    }
}

} // namespace bamg

#endif
