// Command-line driver for the two-level bootstrap AMG experiments:
//   run      full pipeline over a JSON config
//   table1   builtin anisotropic sweep (4 angles x 3 epsilons x 3 sizes)
//   pattern  single cell with JSON pattern export and optional debug dumps
//   stencil  coarse-operator stencil of a single cell, printed h^2-scaled

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bamg/bamg.hpp"

namespace {

using namespace bamg;

constexpr real_t kPi = 3.14159265358979323846;

void print_report_line(const ExperimentConfig& cfg, const CellResult& r) {
    if (!r.error.empty()) {
        std::printf("alpha=%+.6f eps=%-8g N=%-4d seed=%llu  ERROR: %s\n", r.cell.alpha,
                    r.cell.epsilon, r.cell.N, static_cast<unsigned long long>(r.cell.seed),
                    r.error.c_str());
        return;
    }
    std::printf("alpha=%+.6f eps=%-8g N=%-4d seed=%llu  rho=%.3f rho_f=%.3f gamma_g=%.3f "
                "gamma_o=%.3f\n",
                r.cell.alpha, r.cell.epsilon, r.cell.N,
                static_cast<unsigned long long>(r.cell.seed), r.report.rho, r.report.rho_f,
                r.report.gamma_g, r.report.gamma_o);
    (void)cfg;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::uint64_t seed_override, int d_override, double theta_override,
            int caliber_override) {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_csv = out_override;
    if (seed_override != 0) cfg.seeds = {seed_override};
    if (d_override > 0) cfg.d = d_override;
    if (theta_override > 0.0) cfg.theta_ad = theta_override;
    if (caliber_override > 0) cfg.caliber = caliber_override;
    cfg.validate();
    auto results = run_experiment(cfg);
    for (const auto& r : results) print_report_line(cfg, r);
    if (!cfg.out_csv.empty()) std::printf("wrote %s\n", cfg.out_csv.c_str());
    for (const auto& r : results)
        if (!r.error.empty()) return 2;
    return 0;
}

ExperimentConfig table1_config() {
    ExperimentConfig cfg;
    cfg.alpha_values = {kPi / 4, -kPi / 4, kPi / 8, 0.0};
    cfg.epsilon_values = {0.1, 1e-4, 0.0};
    cfg.n_values = {32, 64, 128};
    cfg.seeds = {1, 2, 3};
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level bootstrap AMG experiments on anisotropic diffusion"};
    app.require_subcommand(1);

    // shared overrides
    std::uint64_t seed = 0;
    int d = 0;
    double theta_ad = 0.0;
    int caliber = 0;
    std::string out;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed override");
        cmd->add_option("--d", d, "strength graph depth override");
        cmd->add_option("--theta-ad", theta_ad, "strength threshold override");
        cmd->add_option("--caliber", caliber, "interpolation caliber override");
        cmd->add_option("--out", out, "output path override");
    };

    // run
    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run a JSON experiment config");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    add_common(run);

    // table1
    CLI::App* table1 = app.add_subcommand("table1", "builtin anisotropic sweep");
    add_common(table1);
    std::vector<int> table_sizes;
    table1->add_option("--n", table_sizes, "grid sizes (default 32 64 128)");

    // pattern
    CLI::App* pattern = app.add_subcommand("pattern", "single cell with pattern export");
    std::string alpha_text = "0";
    double epsilon = 1e-10;
    int n_grid = 32;
    std::string emit_matrix, emit_strength, emit_tvs, emit_cr;
    pattern->add_option("--alpha", alpha_text, "angle (radians or pi fraction)");
    pattern->add_option("--epsilon", epsilon, "anisotropy coefficient");
    pattern->add_option("--n", n_grid, "grid parameter N");
    pattern->add_option("--emit-matrix", emit_matrix, "write the operator in Matrix Market form");
    pattern->add_option("--emit-strength", emit_strength, "write the strength graph edge list");
    pattern->add_option("--emit-tvs", emit_tvs, "write the test vectors as CSV");
    pattern->add_option("--emit-cr", emit_cr, "write the CR stage report as JSON lines");
    add_common(pattern);

    // stencil
    CLI::App* stencil = app.add_subcommand("stencil", "coarse-operator stencil of one cell");
    std::string st_alpha = "pi/4";
    double st_eps = 1e-10;
    int st_n = 32;
    stencil->add_option("--alpha", st_alpha, "angle (radians or pi fraction)");
    stencil->add_option("--epsilon", st_eps, "anisotropy coefficient");
    stencil->add_option("--n", st_n, "grid parameter N");
    add_common(stencil);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out, seed, d, theta_ad, caliber);

        if (table1->parsed()) {
            ExperimentConfig cfg = table1_config();
            if (!table_sizes.empty())
                cfg.n_values.assign(table_sizes.begin(), table_sizes.end());
            if (seed != 0) cfg.seeds = {seed};
            if (d > 0) cfg.d = d;
            if (theta_ad > 0.0) cfg.theta_ad = theta_ad;
            if (caliber > 0) cfg.caliber = caliber;
            cfg.out_csv = out.empty() ? "table1.csv" : out;
            auto results = run_experiment(cfg);
            for (const auto& r : results) print_report_line(cfg, r);
            std::printf("wrote %s\n", cfg.out_csv.c_str());
            for (const auto& r : results)
                if (!r.error.empty()) return 2;
            return 0;
        }

        if (pattern->parsed()) {
            ExperimentConfig cfg;
            cfg.alpha_values = {parse_angle(alpha_text)};
            cfg.epsilon_values = {epsilon};
            cfg.n_values = {static_cast<index_t>(n_grid)};
            if (seed != 0) cfg.seeds = {seed};
            if (d > 0) cfg.d = d;
            if (theta_ad > 0.0) cfg.theta_ad = theta_ad;
            if (caliber > 0) cfg.caliber = caliber;
            ExperimentCell cell{cfg.alpha_values[0], epsilon, static_cast<index_t>(n_grid),
                                cfg.seeds[0]};
            CellResult r = run_cell(cfg, cell, /*keep_hierarchy=*/true);
            print_report_line(cfg, r);
            if (!r.error.empty()) return 2;
            const std::string path = out.empty() ? "pattern.json" : out;
            export_pattern(r, path);
            std::printf("wrote %s\n", path.c_str());

            if (!emit_matrix.empty() || !emit_strength.empty() || !emit_tvs.empty() ||
                !emit_cr.empty()) {
                ProblemSpec spec{cell.N, cell.alpha, cell.epsilon};
                SparseMatrix A = assemble_matrix(spec);
                if (!emit_matrix.empty()) {
                    write_matrix_market(A, emit_matrix);
                    std::printf("wrote %s\n", emit_matrix.c_str());
                }
                TestVectorSet tvs =
                    generate_test_vectors(A, cfg.k, cfg.tv_relax_count, cell_seed(cell, 0x7601));
                if (!cfg.uniform_weights) tvs.weights = compute_weights(A, tvs);
                if (!emit_tvs.empty()) {
                    std::ofstream tv_out(emit_tvs);
                    for (index_t i = 0; i < A.n; ++i) {
                        for (index_t kk = 0; kk < tvs.k(); ++kk)
                            tv_out << (kk ? "," : "") << tvs.vectors[kk][i];
                        tv_out << "\n";
                    }
                    std::printf("wrote %s\n", emit_tvs.c_str());
                }
                if (!emit_strength.empty()) {
                    const LsFitData fit = make_ls_fit_data(A, tvs);
                    std::vector<char> f_mask(A.n, 1);
                    for (index_t c : r.split->c_indices) f_mask[c] = 0;
                    StrengthGraph g = build_strength_graph(fit, f_mask, cfg.d, cfg.theta_ad);
                    write_edge_list(g, emit_strength);
                    std::printf("wrote %s\n", emit_strength.c_str());
                }
                if (!emit_cr.empty()) {
                    std::ofstream cr_out(emit_cr);
                    cr_out << r.cr.to_json_lines();
                    std::printf("wrote %s\n", emit_cr.c_str());
                }
            }
            return 0;
        }

        if (stencil->parsed()) {
            ExperimentConfig cfg;
            const real_t alpha = parse_angle(st_alpha);
            cfg.alpha_values = {alpha};
            cfg.epsilon_values = {st_eps};
            cfg.n_values = {static_cast<index_t>(st_n)};
            if (seed != 0) cfg.seeds = {seed};
            if (d > 0) cfg.d = d;
            if (theta_ad > 0.0) cfg.theta_ad = theta_ad;
            if (caliber > 0) cfg.caliber = caliber;
            ExperimentCell cell{alpha, st_eps, static_cast<index_t>(st_n), cfg.seeds[0]};
            CellResult r = run_cell(cfg, cell, /*keep_hierarchy=*/true);
            print_report_line(cfg, r);
            if (!r.error.empty()) return 2;
            nlohmann::json j = pattern_json(r);
            std::printf("h^2-scaled coarse stencil at the central C point "
                        "(dx, dy, value):\n");
            const auto& offs = j["coarse_stencil"]["offsets"];
            const auto& vals = j["coarse_stencil"]["values"];
            for (std::size_t t = 0; t < offs.size(); ++t)
                std::printf("  (%+3d, %+3d)  %8.2f\n", offs[t][0].get<int>(),
                            offs[t][1].get<int>(), vals[t].get<double>());
            if (!out.empty()) {
                std::ofstream o(out);
                o << j["coarse_stencil"].dump(2) << "\n";
                std::printf("wrote %s\n", out.c_str());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
