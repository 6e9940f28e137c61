#ifndef BAMG_EXPERIMENT_RUNNER_HPP
#define BAMG_EXPERIMENT_RUNNER_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bamg/experiment/config.hpp"
#include "bamg/problem/anisotropic.hpp"
#include "bamg/setup/cr_coarsen.hpp"
#include "bamg/setup/ls_interp.hpp"
#include "bamg/solver/two_grid.hpp"

namespace bamg {

/// One (alpha, epsilon, N, seed) experiment cell.
struct ExperimentCell {
    real_t alpha = 0.0;
    real_t epsilon = 1.0;
    index_t N = 32;
    std::uint64_t seed = 1;
};

/// Derives the per-purpose RNG streams for a cell from the master seed, so
/// that cells are order-independent and reruns are byte-identical.
inline std::uint64_t cell_seed(const ExperimentCell& cell, std::uint64_t purpose) {
    std::uint64_t s = mix64(cell.seed);
    s = mix64(s, seed_tag(cell.alpha));
    s = mix64(s, seed_tag(cell.epsilon));
    s = mix64(s, static_cast<std::uint64_t>(cell.N));
    return mix64(s, purpose);
}

struct CellResult {
    ExperimentCell cell;
    SolveReport report;
    CRReport cr;
    std::string error; // empty on success
    std::optional<TwoGridHierarchy> hierarchy;
    std::optional<CFSplit> split;
};

/// Runs the full setup + solve pipeline for one cell: assemble, generate and
/// weight test vectors, CR coarsening, LS interpolation, Galerkin hierarchy,
/// convergence measurement.
inline CellResult run_cell(const ExperimentConfig& cfg, const ExperimentCell& cell,
                           bool keep_hierarchy = false) {
    CellResult res;
    res.cell = cell;
    try {
        ProblemSpec spec{cell.N, cell.alpha, cell.epsilon};
        const SparseMatrix A = assemble_matrix(spec);

        TestVectorSet tvs =
            generate_test_vectors(A, cfg.k, cfg.tv_relax_count, cell_seed(cell, 0x7601));
        if (!cfg.uniform_weights) tvs.weights = compute_weights(A, tvs);

        CoarsenParams cr_params;
        cr_params.nu = cfg.nu;
        cr_params.delta = cfg.delta;
        cr_params.d = cfg.d;
        cr_params.theta_ad = cfg.theta_ad;
        cr_params.max_stages = cfg.max_stages;
        cr_params.random_start = cfg.cr_random_start;
        if (cfg.cr_rate_estimate == "full_window")
            cr_params.rate_estimate = CrRateEstimate::full_window;
        else if (cfg.cr_rate_estimate == "last_ratio")
            cr_params.rate_estimate = CrRateEstimate::last_ratio;
        else
            cr_params.rate_estimate = CrRateEstimate::skip_first;
        cr_params.start_seed = cell_seed(cell, 0x7602);
        auto [split, cr_report] = cr_coarsen(A, tvs, cr_params);
        res.cr = cr_report;

        const LsFitData fit = make_ls_fit_data(
            A, tvs, cfg.direct_ls_form ? LsForm::direct : LsForm::residual_corrected);
        InterpSearchParams interp;
        interp.caliber = cfg.caliber;
        interp.search_depth = cfg.effective_d_ls();
        interp.gamma = cfg.gamma;
        interp.truncation = cfg.truncation;
        interp.max_candidates = cfg.max_candidates;
        InterpBuildResult built = assemble_interpolation(fit, split, interp);

        TwoGridHierarchy h = build_hierarchy(A, built.P, cfg.pre_sweeps, cfg.post_sweeps);
        const auto [gamma_o, gamma_g] = complexity_metrics(A, h.A_coarse, split);
        const ConvergenceEstimate est = estimate_convergence(h, cfg.eta, cell_seed(cell, 0x7603));

        res.report.rho = est.rho;
        res.report.rho_f = cr_report.final_rho_f;
        res.report.gamma_o = gamma_o;
        res.report.gamma_g = gamma_g;
        res.report.iterations = est.iterations;
        if (keep_hierarchy) {
            res.hierarchy = std::move(h);
            res.split = std::move(split);
        }
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    return res;
}

inline std::string csv_header() {
    return "alpha,epsilon,N,d,d_LS,rho,rho_f,gamma_g,gamma_o,seed,error";
}

inline std::string csv_row(const ExperimentConfig& cfg, const CellResult& r) {
    char buf[320];
    if (r.error.empty()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d,%d,%.10g,%.10g,%.10g,%.10g,%llu,",
                      r.cell.alpha, r.cell.epsilon, r.cell.N, cfg.d, cfg.effective_d_ls(),
                      r.report.rho, r.report.rho_f, r.report.gamma_g, r.report.gamma_o,
                      static_cast<unsigned long long>(r.cell.seed));
        return buf;
    }
    std::string err = r.error;
    for (char& c : err)
        if (c == ',' || c == '\n') c = ';';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d,%d,,,,,%llu,", r.cell.alpha,
                  r.cell.epsilon, r.cell.N, cfg.d, cfg.effective_d_ls(),
                  static_cast<unsigned long long>(r.cell.seed));
    return std::string(buf) + err;
}

/// JSON pattern export for one completed cell: coarse grid coordinates, the
/// F-to-C interpolation edges, and the h^2-scaled coarse stencil at the C
/// point nearest the grid center.
inline nlohmann::json pattern_json(const CellResult& r) {
    if (!r.hierarchy || !r.split)
        throw std::invalid_argument("pattern_json: cell was run without keep_hierarchy");
    const TwoGridHierarchy& h = *r.hierarchy;
    const CFSplit& split = *r.split;
    ProblemSpec spec{r.cell.N, r.cell.alpha, r.cell.epsilon};

    nlohmann::json j;
    j["grid"] = r.cell.N;
    auto& coarse = j["coarse"] = nlohmann::json::array();
    for (index_t c : split.c_indices) {
        const auto [ix, iy] = spec.coords(c);
        coarse.push_back({ix, iy});
    }
    auto& edges = j["interp_edges"] = nlohmann::json::array();
    const InterpOperator& P = h.P;
    for (index_t i = 0; i < P.n_fine; ++i) {
        if (split.is_coarse[i]) continue;
        const auto [fx, fy] = spec.coords(i);
        for (index_t k = P.row_starts[i]; k < P.row_starts[i + 1]; ++k) {
            const auto [cx, cy] = spec.coords(P.coarse_to_fine[P.cols[k]]);
            edges.push_back({fx, fy, cx, cy});
        }
    }
    // Stencil at the most central coarse point.
    index_t best = 0;
    real_t best_dist = std::numeric_limits<real_t>::max();
    const real_t mid = (static_cast<real_t>(r.cell.N) - 1.0) / 2.0;
    for (index_t J = 0; J < static_cast<index_t>(split.c_indices.size()); ++J) {
        const auto [ix, iy] = spec.coords(split.c_indices[J]);
        const real_t dd = (ix - mid) * (ix - mid) + (iy - mid) * (iy - mid);
        if (dd < best_dist) {
            best_dist = dd;
            best = J;
        }
    }
    auto stencil = extract_coarse_stencil(h, spec, best);
    auto& offsets = j["coarse_stencil"]["offsets"] = nlohmann::json::array();
    auto& values = j["coarse_stencil"]["values"] = nlohmann::json::array();
    for (const auto& e : stencil) {
        offsets.push_back({e.dx, e.dy});
        values.push_back(e.value);
    }
    return j;
}

inline void export_pattern(const CellResult& r, const std::string& path) {
    nlohmann::json j = pattern_json(r);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_pattern: cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("export_pattern: write failed");
}

/// Runs every (alpha, epsilon, N, seed) cell of the config. Failures are
/// recorded per cell and the run continues. Writes the CSV (and optional
/// pattern exports) when paths are configured.
inline std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool keep = !cfg.pattern_dir.empty();
    std::vector<CellResult> results;
    for (real_t alpha : cfg.alpha_values)
        for (real_t eps : cfg.epsilon_values)
            for (index_t N : cfg.n_values)
                for (std::uint64_t seed : cfg.seeds)
                    results.push_back(run_cell(cfg, {alpha, eps, N, seed}, keep));

    if (!cfg.out_csv.empty()) {
        std::ofstream out(cfg.out_csv);
        if (!out) throw std::runtime_error("run_experiment: cannot open " + cfg.out_csv);
        out << csv_header() << "\n";
        for (const auto& r : results) out << csv_row(cfg, r) << "\n";
        if (!out) throw std::runtime_error("run_experiment: CSV write failed");
    }
    if (keep) {
        std::filesystem::create_directories(cfg.pattern_dir);
        for (const auto& r : results) {
            if (!r.error.empty()) continue;
            char name[160];
            std::snprintf(name, sizeof(name), "pattern_a%.6f_e%g_N%d_s%llu.json", r.cell.alpha,
                          r.cell.epsilon, r.cell.N,
                          static_cast<unsigned long long>(r.cell.seed));
            export_pattern(r, (std::filesystem::path(cfg.pattern_dir) / name).string());
        }
    }
    return results;
}

} // namespace bamg

#endif
