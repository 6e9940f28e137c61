#include <catch2/catch_amalgamated.hpp>

#include "bamg/setup/cr_coarsen.hpp"
#include "bamg/setup/ls_interp.hpp"
#include "bamg/solver/two_grid.hpp"
#include "test_support.hpp"

using namespace bamg;
using bamg::testing::laplacian_1d;
using bamg::testing::to_dense;
using Catch::Matchers::WithinAbs;

namespace {

/// Linear interpolation onto the even points of an n-chain.
InterpOperator chain_linear_interp(index_t n, const CFSplit& split) {
    InterpOperator P;
    P.n_fine = n;
    P.n_coarse = static_cast<index_t>(split.c_indices.size());
    P.coarse_to_fine = split.c_indices;
    P.row_starts.assign(n + 1, 0);
    P.fitness.assign(n, 0.0);
    P.caliber_used.assign(n, 0);
    std::vector<index_t> fine_to_coarse(n, -1);
    for (index_t J = 0; J < P.n_coarse; ++J) fine_to_coarse[split.c_indices[J]] = J;
    for (index_t i = 0; i < n; ++i) {
        if (split.is_coarse[i]) {
            P.cols.push_back(fine_to_coarse[i]);
            P.weights.push_back(1.0);
        } else {
            if (i > 0 && fine_to_coarse[i - 1] >= 0) {
                P.cols.push_back(fine_to_coarse[i - 1]);
                P.weights.push_back(0.5);
            }
            if (i + 1 < n && fine_to_coarse[i + 1] >= 0) {
                P.cols.push_back(fine_to_coarse[i + 1]);
                P.weights.push_back(0.5);
            }
        }
        P.row_starts[i + 1] = static_cast<index_t>(P.cols.size());
    }
    return P;
}

} // namespace

TEST_CASE("identity hierarchy reproduces the fine operator", "[hierarchy]") {
    Rng rng(1);
    SparseMatrix A = bamg::testing::random_spd(10, 0.4, rng);
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(10));
    REQUIRE(h.A_coarse.nnz() == A.nnz());
    for (index_t k = 0; k < A.nnz(); ++k) CHECK(h.A_coarse.values[k] == A.values[k]);
}

TEST_CASE("chain hierarchy matches the dense triple product", "[hierarchy]") {
    SparseMatrix A = laplacian_1d(4);
    CFSplit split = make_cf_split(4, {0, 2});
    InterpOperator P = chain_linear_interp(4, split);
    TwoGridHierarchy h = build_hierarchy(A, P);
    Eigen::MatrixXd dense = to_dense(P).transpose() * to_dense(A) * to_dense(P);
    REQUIRE(h.A_coarse.n == 2);
    for (index_t I = 0; I < 2; ++I)
        for (index_t J = 0; J < 2; ++J)
            CHECK_THAT(h.A_coarse.at(I, J), WithinAbs(dense(I, J), 1e-13));
    // SPD: diagonal positive, symmetric, positive determinant
    CHECK(h.A_coarse.at(0, 0) > 0.0);
    CHECK(dense.determinant() > 0.0);
}

TEST_CASE("singular coarse operators are surfaced", "[hierarchy]") {
    SparseMatrix A = laplacian_1d(4);
    // a prolongation with two identical columns makes P'AP singular
    InterpOperator P;
    P.n_fine = 4;
    P.n_coarse = 2;
    P.coarse_to_fine = {0, 1};
    P.row_starts = {0, 2, 4, 6, 8};
    P.cols = {0, 1, 0, 1, 0, 1, 0, 1};
    P.weights = {1, 1, 0.5, 0.5, 0.25, 0.25, 0.125, 0.125};
    P.fitness.assign(4, 0.0);
    P.caliber_used.assign(4, 0);
    CHECK_THROWS_AS(build_hierarchy(A, P), std::runtime_error);
}

TEST_CASE("exact solutions are fixed points of the cycle", "[cycle]") {
    SparseMatrix A = laplacian_1d(8);
    CFSplit split = make_cf_split(8, {0, 2, 4, 6});
    TwoGridHierarchy h = build_hierarchy(A, chain_linear_interp(8, split));
    DenseVector xs{1, -1, 2, 0.5, 3, -2, 1, 0};
    DenseVector b = spmv(A, xs);
    DenseVector x = xs;
    two_grid_cycle(h, x, b);
    for (index_t i = 0; i < 8; ++i) CHECK_THAT(x[i], WithinAbs(xs[i], 1e-12));
}

TEST_CASE("a coarse space containing the error solves in one cycle", "[cycle]") {
    // error after pre-smoothing lies in range(P) when P interpolates the
    // whole fine space: use identity P
    Rng rng(8);
    SparseMatrix A = bamg::testing::random_spd(12, 0.3, rng);
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(12));
    DenseVector x = rng.uniform_pos_vector(12);
    const DenseVector b(12, 0.0);
    two_grid_cycle(h, x, b);
    CHECK(norm_inf(x) < 1e-10);
}

TEST_CASE("coarse correction does not increase the A-norm of the error", "[cycle]") {
    SparseMatrix A = laplacian_1d(16);
    CFSplit split = make_cf_split(16, {0, 2, 4, 6, 8, 10, 12, 14});
    TwoGridHierarchy h = build_hierarchy(A, chain_linear_interp(16, split));
    Rng rng(4);
    DenseVector x = rng.uniform_pos_vector(16);
    for (int it = 0; it < 5; ++it) {
        const real_t before = a_norm(h.A_fine, x);
        DenseVector r = spmv(h.A_fine, x);
        for (auto& v : r) v = -v;
        const DenseVector rc = restrict_to_coarse(h.P, r);
        const DenseVector ec = h.coarse_solver->solve(rc);
        prolongate_add(h.P, ec, x);
        const real_t after = a_norm(h.A_fine, x);
        CHECK(after <= before * (1.0 + 1e-12));
        gauss_seidel_sweep(h.A_fine, x, DenseVector(16, 0.0));
    }
}

TEST_CASE("convergence estimation flags early exactness", "[convergence]") {
    // a diagonal system is solved exactly by the first smoothing sweep
    SparseMatrix A = matrix_from_triplets(
        5, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}, {3, 3, 4.0}, {4, 4, 5.0}});
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(5));
    ConvergenceEstimate est = estimate_convergence(h, 10, 3);
    CHECK(est.early_exact);
    CHECK(est.iterations == 1);
}

TEST_CASE("convergence ratios stabilize on the isotropic problem", "[convergence]") {
    ProblemSpec spec{16, 0.0, 1.0};
    SparseMatrix A = assemble_matrix(spec);
    TestVectorSet tvs = generate_test_vectors(A, 8, 40, 12);
    tvs.weights = compute_weights(A, tvs);
    auto [split, cr] = cr_coarsen(A, tvs, {});
    InterpBuildResult built = assemble_interpolation(A, tvs, split, {});
    TwoGridHierarchy h = build_hierarchy(A, built.P);
    const real_t rho100 = estimate_convergence(h, 100, 5).rho;
    const real_t rho50 = estimate_convergence(h, 50, 5).rho;
    CHECK(rho100 < 1.0);
    CHECK(std::fabs(rho100 - rho50) < 0.05);
}

TEST_CASE("complexity metrics on trivial splits", "[metrics]") {
    Rng rng(2);
    SparseMatrix A = bamg::testing::random_spd(10, 0.4, rng);
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(10));
    CFSplit all = make_cf_split(10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    auto [go, gg] = complexity_metrics(A, h.A_coarse, all);
    CHECK_THAT(go, WithinAbs(2.0, 1e-15));
    CHECK_THAT(gg, WithinAbs(1.0, 1e-15));

    CFSplit half = make_cf_split(10, {0, 2, 4, 6, 8});
    auto [go2, gg2] = complexity_metrics(A, h.A_coarse, half);
    CHECK_THAT(gg2, WithinAbs(0.5, 1e-15));
}

TEST_CASE("identity transfer recovers the original stencil", "[stencil]") {
    ProblemSpec spec{4, 0.0, 1.0};
    SparseMatrix A = assemble_matrix(spec);
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(A.n));
    const index_t center = spec.vertex(1, 1);
    auto entries = extract_coarse_stencil(h, spec, center);
    REQUIRE(entries.size() == 5);
    for (const auto& e : entries) {
        if (e.dx == 0 && e.dy == 0)
            CHECK_THAT(e.value, WithinAbs(4.0, 1e-12));
        else
            CHECK_THAT(e.value, WithinAbs(-1.0, 1e-12));
    }
}

TEST_CASE("stencil extraction rejects out-of-range vertices", "[stencil]") {
    ProblemSpec spec{4, 0.0, 1.0};
    SparseMatrix A = assemble_matrix(spec);
    TwoGridHierarchy h = build_hierarchy(A, InterpOperator::identity(A.n));
    CHECK_THROWS_AS(extract_coarse_stencil(h, spec, A.n + 5), std::invalid_argument);
}

TEST_CASE("hierarchy solves and reports deterministically", "[determinism]") {
    ProblemSpec spec{12, 0.7853981633974483, 0.1};
    SparseMatrix A = assemble_matrix(spec);
    TestVectorSet tvs = generate_test_vectors(A, 6, 20, 40);
    tvs.weights = compute_weights(A, tvs);
    auto [split, cr] = cr_coarsen(A, tvs, {});
    InterpBuildResult built = assemble_interpolation(A, tvs, split, {});
    TwoGridHierarchy h = build_hierarchy(A, built.P);
    const real_t r1 = estimate_convergence(h, 30, 99).rho;
    const real_t r2 = estimate_convergence(h, 30, 99).rho;
    CHECK(r1 == r2);
}
