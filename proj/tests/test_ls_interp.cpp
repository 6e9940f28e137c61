#include <catch2/catch_amalgamated.hpp>

#include <Eigen/QR>
#include <set>

#include "bamg/problem/anisotropic.hpp"
#include "bamg/setup/ls_interp.hpp"
#include "test_support.hpp"

using namespace bamg;
using bamg::testing::laplacian_1d;
using Catch::Matchers::WithinAbs;

namespace {

TestVectorSet make_tvs(std::vector<DenseVector> vectors, std::vector<real_t> weights) {
    TestVectorSet tvs;
    tvs.vectors = std::move(vectors);
    tvs.weights = std::move(weights);
    return tvs;
}

} // namespace

TEST_CASE("coarse neighborhood on the chain", "[neighborhood]") {
    SparseMatrix A = laplacian_1d(11);
    CFSplit split = make_cf_split(11, {0, 2, 4, 6, 8, 10});
    CHECK(coarse_neighborhood(A, split, 5, 1) == std::vector<index_t>{4, 6});
    CHECK(coarse_neighborhood(A, split, 5, 3) == std::vector<index_t>{2, 4, 6, 8});
}

TEST_CASE("coarse neighborhood matches a BFS oracle", "[neighborhood]") {
    ProblemSpec spec{8, 0.4, 0.3};
    SparseMatrix A = assemble_matrix(spec);
    Rng rng(12);
    std::vector<index_t> coarse;
    for (index_t i = 0; i < A.n; ++i)
        if (rng.uniform_pos() < 0.3) coarse.push_back(i);
    CFSplit split = make_cf_split(A.n, coarse);
    // dense BFS distances
    for (index_t f : split.f_indices) {
        std::vector<index_t> dist(A.n, -1);
        dist[f] = 0;
        std::vector<index_t> frontier{f};
        for (index_t lv = 1; lv <= 4; ++lv) {
            std::vector<index_t> next;
            for (index_t u : frontier)
                for (index_t j : A.row_cols(u))
                    if (dist[j] < 0) {
                        dist[j] = lv;
                        next.push_back(j);
                    }
            frontier = next;
        }
        std::set<index_t> expect;
        for (index_t c : split.c_indices)
            if (dist[c] > 0 && dist[c] <= 4) expect.insert(c);
        auto got = coarse_neighborhood(A, split, f, 4);
        CHECK(std::set<index_t>(got.begin(), got.end()) == expect);
    }
}

TEST_CASE("singleton set fit reduces to the one-point fit", "[lsfitset]") {
    Rng rng(3);
    SparseMatrix A = bamg::testing::random_spd(8, 0.4, rng);
    TestVectorSet tvs;
    for (int kk = 0; kk < 4; ++kk) tvs.vectors.push_back(rng.uniform_pos_vector(8));
    tvs.weights = {0.1, 0.2, 0.3, 0.4};
    LsFitData d = make_ls_fit_data(A, tvs);
    for (auto [i, j] : {std::pair<index_t, index_t>{0, 3}, {5, 1}}) {
        OnePointFit f1 = one_point_ls_fit(d, i, j);
        std::vector<index_t> W{j};
        LsSetFit f2 = ls_fit_set(d, i, W);
        CHECK_THAT(f2.coefficients[0], WithinAbs(f1.p, 1e-13));
        CHECK_THAT(f2.ls_value, WithinAbs(f1.ls_value, 1e-13));
    }
}

TEST_CASE("targets inside the span are fitted exactly", "[lsfitset]") {
    SparseMatrix I = identity_matrix(3);
    // target column 0 = 2*col1 - col2 across the vector set
    TestVectorSet tvs = make_tvs({{2.0 * 1.0 - 0.5, 1.0, 0.5},
                                  {2.0 * 0.2 - 1.5, 0.2, 1.5},
                                  {2.0 * -1.0 - 0.3, -1.0, 0.3}},
                                 {0.3, 0.3, 0.4});
    LsFitData d = make_ls_fit_data(I, tvs, LsForm::direct);
    std::vector<index_t> W{1, 2};
    LsSetFit f = ls_fit_set(d, 0, W);
    CHECK_THAT(f.ls_value, WithinAbs(0.0, 1e-13));
    CHECK_THAT(f.coefficients[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT(f.coefficients[1], WithinAbs(-1.0, 1e-12));
    // residual orthogonality: residual is zero here, trivially orthogonal
}

TEST_CASE("set fits match a dense weighted QR oracle", "[lsfitset]") {
    Rng rng(9);
    SparseMatrix A = bamg::testing::random_spd(12, 0.35, rng);
    TestVectorSet tvs;
    for (int kk = 0; kk < 8; ++kk) tvs.vectors.push_back(rng.uniform_pos_vector(12));
    tvs.weights.assign(8, 0.125);
    tvs.weights[0] = 0.3;
    tvs.weights[7] = 0.075;
    real_t sum = 0.0;
    for (real_t w : tvs.weights) sum += w;
    for (real_t& w : tvs.weights) w /= sum;
    LsFitData d = make_ls_fit_data(A, tvs);

    for (index_t i : {index_t(0), index_t(4), index_t(11)}) {
        std::vector<index_t> W{(i + 1) % 12, (i + 3) % 12, (i + 7) % 12};
        std::sort(W.begin(), W.end());
        LsSetFit f = ls_fit_set(d, i, W);
        // oracle: QR on the sqrt-weighted design matrix
        Eigen::MatrixXd M(8, 3);
        Eigen::VectorXd rhs(8);
        for (int kk = 0; kk < 8; ++kk) {
            const real_t sw = std::sqrt(tvs.weights[kk]);
            for (int s = 0; s < 3; ++s) M(kk, s) = sw * tvs.vectors[kk][W[s]];
            rhs(kk) = sw * d.targets[kk][i];
        }
        Eigen::VectorXd p = M.colPivHouseholderQr().solve(rhs);
        const real_t ls = (M * p - rhs).squaredNorm();
        for (int s = 0; s < 3; ++s) CHECK_THAT(f.coefficients[s], WithinAbs(p(s), 1e-10));
        CHECK_THAT(f.ls_value, WithinAbs(ls, 1e-10));
    }
}

TEST_CASE("oversized sets are rejected", "[lsfitset]") {
    SparseMatrix I = identity_matrix(5);
    TestVectorSet tvs = make_tvs({{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}}, {0.5, 0.5});
    LsFitData d = make_ls_fit_data(I, tvs, LsForm::direct);
    std::vector<index_t> W{1, 2, 3};
    CHECK_THROWS_AS(ls_fit_set(d, 0, W), std::invalid_argument);
}

TEST_CASE("LS values are monotone under set inclusion", "[lsfitset]") {
    Rng rng(21);
    SparseMatrix A = bamg::testing::random_spd(15, 0.3, rng);
    TestVectorSet tvs;
    for (int kk = 0; kk < 6; ++kk) tvs.vectors.push_back(rng.uniform_pos_vector(15));
    tvs.weights.assign(6, 1.0 / 6.0);
    LsFitData d = make_ls_fit_data(A, tvs);
    for (int trial = 0; trial < 30; ++trial) {
        const index_t i = static_cast<index_t>(rng.raw() % 15);
        std::vector<index_t> big;
        while (big.size() < 4) {
            index_t j = static_cast<index_t>(rng.raw() % 15);
            if (j != i && std::find(big.begin(), big.end(), j) == big.end()) big.push_back(j);
        }
        std::sort(big.begin(), big.end());
        std::vector<index_t> small(big.begin(), big.begin() + 2);
        const real_t ls_small = ls_fit_set(d, i, small).ls_value;
        const real_t ls_big = ls_fit_set(d, i, big).ls_value;
        CHECK(ls_big <= ls_small + 1e-10);
    }
}

TEST_CASE("single coarse neighbor forces a singleton set", "[select]") {
    SparseMatrix A = laplacian_1d(3);
    CFSplit split = make_cf_split(3, {0});
    TestVectorSet tvs = make_tvs({{1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}}, {0.5, 0.5});
    LsFitData d = make_ls_fit_data(A, tvs);
    InterpSearchParams params;
    params.search_depth = 1;
    InterpolatorySet sel = select_interpolatory_set(d, split, 1, params);
    CHECK(sel.coarse == std::vector<index_t>{0});
    CHECK(sel.coefficients.size() == 1);
}

TEST_CASE("an exact singleton is never replaced", "[select]") {
    // column 2 is exactly proportional to the target at vertex 1
    SparseMatrix I3 = identity_matrix(3);
    TestVectorSet tvs = make_tvs({{0.4, 2.0, 1.0}, {1.0, 6.0, 3.0}}, {0.5, 0.5});
    // direct form: t_1 = (2, 6) = 2 * (1, 3) = 2 * v_2
    SparseMatrix A = matrix_from_triplets(
        3, {{0, 0, 1.0}, {0, 1, -0.2}, {1, 0, -0.2}, {1, 1, 1.0}, {1, 2, -0.3},
            {2, 1, -0.3}, {2, 2, 1.0}},
        true);
    CFSplit split = make_cf_split(3, {0, 2});
    LsFitData d = make_ls_fit_data(A, tvs, LsForm::direct);
    InterpSearchParams params;
    params.caliber = 2;
    params.search_depth = 2;
    InterpolatorySet sel = select_interpolatory_set(d, split, 1, params);
    CHECK(sel.coarse == std::vector<index_t>{2});
    CHECK_THAT(sel.coefficients[0], WithinAbs(2.0, 1e-13));
}

TEST_CASE("selected sets respect the caliber and the neighborhood", "[select]") {
    ProblemSpec spec{10, 0.5, 0.2};
    SparseMatrix A = assemble_matrix(spec);
    TestVectorSet tvs = generate_test_vectors(A, 6, 15, 77);
    tvs.weights = compute_weights(A, tvs);
    LsFitData d = make_ls_fit_data(A, tvs);
    Rng rng(5);
    std::vector<index_t> coarse;
    for (index_t i = 0; i < A.n; ++i)
        if (rng.uniform_pos() < 0.35) coarse.push_back(i);
    CFSplit split = make_cf_split(A.n, coarse);
    InterpSearchParams params;
    params.caliber = 3;
    params.search_depth = 2;
    for (index_t f : split.f_indices) {
        auto nbhd = coarse_neighborhood(A, split, f, params.search_depth);
        InterpolatorySet sel = select_interpolatory_set(d, split, f, params);
        CHECK(sel.coarse.size() <= 3);
        for (index_t c : sel.coarse)
            CHECK(std::binary_search(nbhd.begin(), nbhd.end(), c));
    }
}

TEST_CASE("uncapped search equals the exhaustive oracle", "[select]") {
    ProblemSpec spec{8, -0.7853981633974483, 0.1};
    SparseMatrix A = assemble_matrix(spec);
    TestVectorSet tvs = generate_test_vectors(A, 8, 20, 13);
    tvs.weights = compute_weights(A, tvs);
    LsFitData d = make_ls_fit_data(A, tvs);
    Rng rng(77);
    std::vector<index_t> coarse;
    for (index_t i = 0; i < A.n; ++i)
        if (rng.uniform_pos() < 0.4) coarse.push_back(i);
    CFSplit split = make_cf_split(A.n, coarse);
    InterpSearchParams params;
    params.caliber = 3;
    params.search_depth = 3;
    params.max_candidates = 1000; // no cap
    params.truncation = 0.0;      // compare the raw selection rule
    for (index_t f : split.f_indices) {
        InterpolatorySet got = select_interpolatory_set(d, split, f, params);
        InterpolatorySet expect = bamg::testing::exhaustive_select(d, split, f, params);
        CHECK(got.coarse == expect.coarse);
        CHECK_THAT(got.ls_value,
                   WithinAbs(expect.ls_value, 1e-12 * std::max(1.0, expect.ls_value)));
    }
}

TEST_CASE("all-coarse split yields the identity prolongation", "[assemble]") {
    SparseMatrix A = laplacian_1d(6);
    CFSplit split = make_cf_split(6, {0, 1, 2, 3, 4, 5});
    TestVectorSet tvs = make_tvs({DenseVector(6, 1.0), {1, 2, 3, 4, 5, 6}}, {0.5, 0.5});
    InterpBuildResult built = assemble_interpolation(A, tvs, split, {});
    CHECK(built.P.n_coarse == 6);
    CHECK(built.P.nnz() == 6);
    for (index_t i = 0; i < 6; ++i) {
        CHECK(built.P.cols[i] == i);
        CHECK(built.P.weights[i] == 1.0);
    }
    CHECK_NOTHROW(built.P.validate(split, 4));
}

TEST_CASE("linear test vectors recover linear interpolation", "[assemble]") {
    const index_t n = 9;
    SparseMatrix A = laplacian_1d(n);
    CFSplit split = make_cf_split(n, {0, 2, 4, 6, 8});
    DenseVector lin(n);
    for (index_t i = 0; i < n; ++i) lin[i] = static_cast<real_t>(i + 1);
    TestVectorSet tvs = make_tvs({DenseVector(n, 1.0), lin}, {0.5, 0.5});
    InterpSearchParams params;
    params.caliber = 2;
    params.search_depth = 1;
    InterpBuildResult built = assemble_interpolation(A, tvs, split, params);
    const InterpOperator& P = built.P;
    for (index_t i = 1; i < n; i += 2) {
        REQUIRE(P.row_starts[i + 1] - P.row_starts[i] == 2);
        CHECK_THAT(P.weights[P.row_starts[i]], WithinAbs(0.5, 1e-12));
        CHECK_THAT(P.weights[P.row_starts[i] + 1], WithinAbs(0.5, 1e-12));
        CHECK(P.fitness[i] < 1e-20);
        CHECK(P.caliber_used[i] == 2);
    }
    CHECK_NOTHROW(P.validate(split, 2));
}

TEST_CASE("isolated F vertices produce zero rows with infinite fitness", "[assemble]") {
    // two decoupled blocks; the second block has no coarse point within reach
    SparseMatrix A = matrix_from_triplets(
        4, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 2.0}, {2, 2, 2.0}, {2, 3, -1.0},
            {3, 2, -1.0}, {3, 3, 2.0}},
        true);
    CFSplit split = make_cf_split(4, {0});
    TestVectorSet tvs = make_tvs({{1, 1, 1, 1}, {1, 2, 3, 4}}, {0.5, 0.5});
    InterpSearchParams params;
    params.search_depth = 3;
    params.caliber = 2;
    InterpBuildResult built = assemble_interpolation(A, tvs, split, params);
    CHECK(built.empty_rows == std::vector<index_t>{2, 3});
    CHECK(std::isinf(built.P.fitness[2]));
    CHECK(built.P.row_starts[3] == built.P.row_starts[2]); // empty row
}
