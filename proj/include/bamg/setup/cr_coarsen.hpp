#ifndef BAMG_SETUP_CR_COARSEN_HPP
#define BAMG_SETUP_CR_COARSEN_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "bamg/core/cf_split.hpp"
#include "bamg/core/relaxation.hpp"
#include "bamg/core/rng.hpp"
#include "bamg/setup/strength.hpp"

namespace bamg {

/// Per-stage record of the multistage compatible-relaxation coarsening.
struct CRReport {
    struct Stage {
        index_t stage;
        index_t added;
        real_t rho_f;
    };
    std::vector<Stage> stages;
    std::vector<std::vector<index_t>> stage_picks; // vertices added per growth stage
    real_t final_rho_f = 0.0;
    index_t sweeps_per_stage = 0;

    void validate() const {
        index_t prev_added = 0;
        for (const auto& s : stages) {
            if (s.rho_f < 0.0) throw std::invalid_argument("CRReport: negative rho_f");
            if (s.added < 0) throw std::invalid_argument("CRReport: negative growth");
            prev_added += s.added;
        }
    }

    /// One JSON object per line: {"stage":s,"added":a,"rho_f":r}.
    std::string to_json_lines() const {
        std::string out;
        char buf[128];
        for (const auto& s : stages) {
            std::snprintf(buf, sizeof(buf), "{\"stage\":%d,\"added\":%d,\"rho_f\":%.17g}\n",
                          s.stage, s.added, s.rho_f);
            out += buf;
        }
        return out;
    }
};

/// Compatible-relaxation rate estimate: zeroes the C entries of u0, runs nu
/// F-relaxation sweeps on the homogeneous system, and returns the
/// geometric-mean contraction (||u_f^nu|| / ||u_f^0||)^(1/nu) in the
/// Euclidean norm over the F entries, together with the final iterate.
/// An empty F set returns (0, u0) -- coarsening is perfect.
inline std::pair<real_t, DenseVector> estimate_rho_f(const SparseMatrix& A, const CFSplit& split,
                                                     index_t nu, DenseVector u0) {
    if (nu < 1) throw std::invalid_argument("estimate_rho_f: nu must be >= 1");
    if (static_cast<index_t>(u0.size()) != A.n)
        throw std::invalid_argument("estimate_rho_f: dimension mismatch");
    if (split.f_indices.empty()) return {0.0, std::move(u0)};
    for (index_t c : split.c_indices) u0[c] = 0.0;
    real_t norm0 = 0.0;
    for (index_t f : split.f_indices) norm0 += u0[f] * u0[f];
    norm0 = std::sqrt(norm0);
    if (norm0 == 0.0) throw std::invalid_argument("estimate_rho_f: u0 vanishes on F");
    for (index_t sweep = 0; sweep < nu; ++sweep) f_relaxation_sweep(A, split, u0);
    real_t norm1 = 0.0;
    for (index_t f : split.f_indices) norm1 += u0[f] * u0[f];
    norm1 = std::sqrt(norm1);
    const real_t rho = std::pow(norm1 / norm0, 1.0 / static_cast<real_t>(nu));
    return {rho, std::move(u0)};
}

/// Candidate measure sigma_i = |u_i| / ||u||_inf over the F entries.
inline std::vector<real_t> candidate_measure(const DenseVector& u,
                                             const std::vector<index_t>& f_indices) {
    real_t umax = 0.0;
    for (index_t f : f_indices) umax = std::max(umax, std::fabs(u[f]));
    if (umax == 0.0)
        throw std::invalid_argument("candidate_measure: u vanishes on F (rho_f = 0 path)");
    std::vector<real_t> sigma(u.size(), 0.0);
    for (index_t f : f_indices) sigma[f] = std::fabs(u[f]) / umax;
    return sigma;
}

/// Greedy weighted coloring over the candidate vertices of a strength graph.
/// Weights start as |S_i^T  ∩ candidates|; the largest weight is selected
/// (ties to the lowest index), its strong neighbors become non-selectable,
/// and their still-unassigned strong neighbors get their weights bumped.
/// The result is a maximal independent set of the candidate-induced graph
/// with edges taken as undirected.
inline std::vector<index_t> weighted_coloring_mis(const StrengthGraph& graph,
                                                  const std::vector<index_t>& candidates) {
    const index_t n = graph.n();
    std::vector<char> cand(static_cast<std::size_t>(n), 0);
    for (index_t c : candidates) {
        if (c < 0 || c >= n)
            throw std::invalid_argument("weighted_coloring_mis: candidate out of range");
        cand[c] = 1;
    }
    // Candidate-induced adjacency, forward and transpose.
    std::vector<std::vector<index_t>> succ(static_cast<std::size_t>(n)),
        pred(static_cast<std::size_t>(n));
    for (index_t i : candidates) {
        for (const auto& e : graph.edges[i]) {
            if (!cand[e.to]) continue;
            succ[i].push_back(e.to);
            pred[e.to].push_back(i);
        }
    }
    enum : char { kOpen = 0, kSelected = 1, kExcluded = 2 };
    std::vector<char> state(static_cast<std::size_t>(n), kOpen);
    std::vector<index_t> weight(static_cast<std::size_t>(n), 0);
    for (index_t i : candidates) weight[i] = static_cast<index_t>(pred[i].size());

    // Max-weight selection via a lazy priority queue keyed (weight, -index).
    using Entry = std::pair<index_t, index_t>; // (weight, index)
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
    for (index_t i : candidates) queue.push({weight[i], i});

    std::vector<index_t> picked;
    while (!queue.empty()) {
        auto [w, i] = queue.top();
        queue.pop();
        if (state[i] != kOpen || w != weight[i]) continue; // stale entry
        state[i] = kSelected;
        picked.push_back(i);
        for (const auto& adj : {&succ, &pred}) {
            for (index_t j : (*adj)[i]) {
                if (state[j] != kOpen) continue;
                state[j] = kExcluded;
                for (index_t k2 : pred[j]) {
                    if (state[k2] == kOpen) {
                        weight[k2]++;
                        queue.push({weight[k2], k2});
                    }
                }
            }
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

/// Conflict closure of a strength graph: vertices are joined whenever a path
/// of strength edges between them accumulates at most max_hops of underlying
/// fine-graph distance (each edge contributes the hop count it was found
/// at). With depth 1 this is the graph itself; at larger depths it extends
/// conflicts along chains of short strong edges, which is what lets the
/// coloring space coarse points d+1 apart along a grid-aligned strong
/// direction while keeping them adjacent across genuinely long-range (full
/// depth) connections. Edges carry the smallest accumulated hop count.
inline StrengthGraph strength_path_closure(const StrengthGraph& graph,
                                           const std::vector<index_t>& vertices,
                                           index_t max_hops) {
    const index_t n = graph.n();
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    for (index_t v : vertices) in[v] = 1;
    // Undirected adjacency with minimal hop labels over the induced subgraph.
    std::vector<std::vector<std::pair<index_t, index_t>>> adj(static_cast<std::size_t>(n));
    for (index_t i : vertices) {
        for (const auto& e : graph.edges[i]) {
            if (!in[e.to]) continue;
            adj[i].push_back({e.to, e.hops});
            adj[e.to].push_back({i, e.hops});
        }
    }
    StrengthGraph closure;
    closure.depth = graph.depth;
    closure.theta_ad = graph.theta_ad;
    closure.in_f = graph.in_f;
    closure.edges.resize(static_cast<std::size_t>(n));
    std::vector<index_t> dist(static_cast<std::size_t>(n), -1);
    for (index_t s : vertices) {
        // Dijkstra over small integer lengths, radius max_hops.
        std::priority_queue<std::pair<index_t, index_t>, std::vector<std::pair<index_t, index_t>>,
                            std::greater<>>
            pq;
        std::vector<index_t> touched;
        dist[s] = 0;
        touched.push_back(s);
        pq.push({0, s});
        while (!pq.empty()) {
            auto [dd, u] = pq.top();
            pq.pop();
            if (dd > dist[u]) continue;
            for (auto [v, len] : adj[u]) {
                const index_t nd = dd + len;
                if (nd > max_hops) continue;
                if (dist[v] < 0 || nd < dist[v]) {
                    if (dist[v] < 0) touched.push_back(v);
                    dist[v] = nd;
                    pq.push({nd, v});
                }
            }
        }
        auto& out = closure.edges[s];
        for (index_t v : touched) {
            if (v != s) out.push_back({v, 0.0, dist[v]});
            dist[v] = -1;
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.to < b.to; });
    }
    return closure;
}

/// How the per-stage CR rate is read off the nu sweeps. The full window is
/// the literal norm-ratio form; skip_first discards the first sweep (the
/// constant start's transient decays much faster than the asymptotic rate,
/// which makes the full-window mean accept coarse sets that a sharper read
/// rejects); last_ratio uses only the final pair. All three coincide at
/// nu = 1.
enum class CrRateEstimate { full_window, skip_first, last_ratio };

struct CoarsenParams {
    index_t nu = 5;          // CR sweeps per stage
    real_t delta = 0.7;      // CR stopping tolerance
    index_t d = 2;           // strength graph depth
    real_t theta_ad = 0.5;   // relative strength threshold
    index_t max_stages = 20; // growth-stage cap
    CrRateEstimate rate_estimate = CrRateEstimate::last_ratio;
    bool random_start = false;
    std::uint64_t start_seed = 0; // used only when random_start
};

/// Multistage compatible-relaxation coarsening. Each stage measures rho_f by
/// nu CR sweeps from the constant vector; while rho_f > delta the candidate
/// set Z = { i in F : sigma_i > 1 - rho_f } is colored over the depth-closed
/// strength graph and the selected independent set joins C.
inline std::pair<CFSplit, CRReport> cr_coarsen(const SparseMatrix& A, const TestVectorSet& tvs,
                                               const CoarsenParams& params) {
    if (!(params.delta > 0.0 && params.delta < 1.0))
        throw std::invalid_argument("cr_coarsen: delta must be in (0,1)");
    const LsFitData fit = make_ls_fit_data(A, tvs);
    const NeighborhoodGraph nbhd = neighborhood_graph(A, params.d);
    const AlgebraicDistanceCache distances = make_distance_cache(fit, nbhd);

    auto start_vector = [&]() {
        if (!params.random_start) return DenseVector(static_cast<std::size_t>(A.n), 1.0);
        Rng rng(params.start_seed);
        return rng.uniform_pos_vector(A.n);
    };

    // Runs the nu CR sweeps of one stage and reads the rate per the
    // configured estimate; the returned iterate is always u after nu sweeps.
    auto measure = [&](const CFSplit& split) -> std::pair<real_t, DenseVector> {
        DenseVector u0 = start_vector();
        if (split.f_indices.empty()) return estimate_rho_f(A, split, params.nu, std::move(u0));
        index_t warmup = 0;
        if (params.nu > 1) {
            if (params.rate_estimate == CrRateEstimate::skip_first) warmup = 1;
            if (params.rate_estimate == CrRateEstimate::last_ratio) warmup = params.nu - 1;
        }
        for (index_t c : split.c_indices) u0[c] = 0.0;
        for (index_t s = 0; s < warmup; ++s) f_relaxation_sweep(A, split, u0);
        real_t fnorm = 0.0;
        for (index_t f : split.f_indices) fnorm += u0[f] * u0[f];
        if (fnorm == 0.0) return {0.0, std::move(u0)}; // annihilated during warmup
        return estimate_rho_f(A, split, params.nu - warmup, std::move(u0));
    };

    CFSplit split = make_cf_split(A.n, {});
    CRReport report;
    report.sweeps_per_stage = params.nu;
    auto [rho_f, u] = measure(split);
    report.stages.push_back({0, 0, rho_f});

    index_t stage = 0;
    while (rho_f > params.delta) {
        ++stage;
        if (stage > params.max_stages)
            throw std::runtime_error("cr_coarsen: stage cap exceeded (rho_f = " +
                                     std::to_string(rho_f) + ")");
        const real_t tol = 1.0 - rho_f;
        const std::vector<real_t> sigma = candidate_measure(u, split.f_indices);
        std::vector<index_t> candidates;
        for (index_t f : split.f_indices)
            if (sigma[f] > tol) candidates.push_back(f);

        std::vector<char> f_mask(static_cast<std::size_t>(A.n), 0);
        for (index_t f : split.f_indices) f_mask[f] = 1;
        const StrengthGraph strength = build_strength_graph_cached(distances, f_mask,
                                                                   params.theta_ad);
        const StrengthGraph conflicts = strength_path_closure(strength, candidates, params.d);
        const std::vector<index_t> picked = weighted_coloring_mis(conflicts, candidates);

        std::vector<index_t> coarse = split.c_indices;
        coarse.insert(coarse.end(), picked.begin(), picked.end());
        split = make_cf_split(A.n, std::move(coarse));
        std::tie(rho_f, u) = measure(split);
        report.stages.push_back({stage, static_cast<index_t>(picked.size()), rho_f});
        report.stage_picks.push_back(picked);
    }
    report.final_rho_f = rho_f;
    return {std::move(split), std::move(report)};
}

} // namespace bamg

#endif
