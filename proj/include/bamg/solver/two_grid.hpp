#ifndef BAMG_SOLVER_TWO_GRID_HPP
#define BAMG_SOLVER_TWO_GRID_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bamg/core/cf_split.hpp"
#include "bamg/core/galerkin.hpp"
#include "bamg/core/interp_operator.hpp"
#include "bamg/core/relaxation.hpp"
#include "bamg/core/rng.hpp"
#include "bamg/core/sparse_matrix.hpp"
#include "bamg/problem/anisotropic.hpp"

namespace bamg {

/// Exact solver for the coarse operator (sparse LDLT with fill-reducing
/// ordering). Verified against probe vectors at construction.
class CoarseSolver {
  public:
    explicit CoarseSolver(const SparseMatrix& Ac) : n_(Ac.n) {
        Eigen::SparseMatrix<real_t> M(Ac.n, Ac.n);
        std::vector<Eigen::Triplet<real_t>> trips;
        trips.reserve(static_cast<std::size_t>(Ac.nnz()));
        for (index_t i = 0; i < Ac.n; ++i)
            for (index_t k = Ac.row_starts[i]; k < Ac.row_starts[i + 1]; ++k)
                trips.push_back({i, Ac.col_indices[k], Ac.values[k]});
        M.setFromTriplets(trips.begin(), trips.end());
        ldlt_.compute(M);
        if (ldlt_.info() != Eigen::Success)
            throw std::runtime_error("CoarseSolver: factorization failed (singular coarse "
                                     "operator?)");
        // Probe: the factorization must solve to direct-solver accuracy.
        Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n_, 1.0, 2.0);
        Eigen::VectorXd x = ldlt_.solve(b);
        const real_t rel = (M * x - b).norm() / b.norm();
        if (!(rel < 1e-10))
            throw std::runtime_error("CoarseSolver: probe residual " + std::to_string(rel) +
                                     " exceeds 1e-10 (coarse operator near-singular?)");
    }

    DenseVector solve(const DenseVector& b) const {
        Eigen::VectorXd rhs(n_);
        for (index_t i = 0; i < n_; ++i) rhs[i] = b[i];
        Eigen::VectorXd x = ldlt_.solve(rhs);
        DenseVector out(static_cast<std::size_t>(n_));
        for (index_t i = 0; i < n_; ++i) out[i] = x[i];
        return out;
    }

    index_t n() const { return n_; }

  private:
    index_t n_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<real_t>> ldlt_;
};

struct TwoGridHierarchy {
    SparseMatrix A_fine;
    InterpOperator P;
    SparseMatrix A_coarse;
    std::unique_ptr<CoarseSolver> coarse_solver;
    index_t pre_sweeps = 2;
    index_t post_sweeps = 2;
};

inline TwoGridHierarchy build_hierarchy(const SparseMatrix& A, const InterpOperator& P,
                                        index_t pre_sweeps = 2, index_t post_sweeps = 2) {
    if (P.n_fine != A.n) throw std::invalid_argument("build_hierarchy: dimension mismatch");
    TwoGridHierarchy h;
    h.A_fine = A;
    h.P = P;
    h.A_coarse = galerkin_product(A, P);
    h.coarse_solver = std::make_unique<CoarseSolver>(h.A_coarse);
    h.pre_sweeps = pre_sweeps;
    h.post_sweeps = post_sweeps;
    return h;
}

inline DenseVector restrict_to_coarse(const InterpOperator& P, const DenseVector& r) {
    DenseVector rc(static_cast<std::size_t>(P.n_coarse), 0.0);
    for (index_t i = 0; i < P.n_fine; ++i)
        for (index_t k = P.row_starts[i]; k < P.row_starts[i + 1]; ++k)
            rc[P.cols[k]] += P.weights[k] * r[i];
    return rc;
}

inline void prolongate_add(const InterpOperator& P, const DenseVector& ec, DenseVector& x) {
    for (index_t i = 0; i < P.n_fine; ++i)
        for (index_t k = P.row_starts[i]; k < P.row_starts[i + 1]; ++k)
            x[i] += P.weights[k] * ec[P.cols[k]];
}

/// One two-grid cycle: pre-smoothing, exact coarse correction
/// x <- x + P Ac^{-1} P'(b - Ax), post-smoothing.
inline void two_grid_cycle(const TwoGridHierarchy& h, DenseVector& x, const DenseVector& b) {
    for (index_t s = 0; s < h.pre_sweeps; ++s) gauss_seidel_sweep(h.A_fine, x, b);
    DenseVector r = spmv(h.A_fine, x);
    for (index_t i = 0; i < h.A_fine.n; ++i) r[i] = b[i] - r[i];
    const DenseVector rc = restrict_to_coarse(h.P, r);
    const DenseVector ec = h.coarse_solver->solve(rc);
    prolongate_add(h.P, ec, x);
    for (index_t s = 0; s < h.post_sweeps; ++s) gauss_seidel_sweep(h.A_fine, x, b);
}

struct ConvergenceEstimate {
    real_t rho = 0.0;
    bool early_exact = false; // the error hit exact zero before eta iterations
    index_t iterations = 0;
};

/// Asymptotic convergence estimate rho = ||e^eta||_A / ||e^(eta-1)||_A on the
/// homogeneous system from a seeded random start. The iterate is rescaled to
/// unit A-norm every step (the ratio is unaffected, underflow is not).
inline ConvergenceEstimate estimate_convergence(const TwoGridHierarchy& h, index_t eta,
                                                std::uint64_t seed) {
    if (eta < 2) throw std::invalid_argument("estimate_convergence: eta must be >= 2");
    Rng rng(seed);
    DenseVector x = rng.uniform_pos_vector(h.A_fine.n);
    const DenseVector b(static_cast<std::size_t>(h.A_fine.n), 0.0);
    real_t norm = a_norm(h.A_fine, x);
    if (norm == 0.0) throw std::runtime_error("estimate_convergence: degenerate start");
    scale(x, 1.0 / norm);
    ConvergenceEstimate est;
    for (index_t it = 0; it < eta; ++it) {
        two_grid_cycle(h, x, b);
        norm = a_norm(h.A_fine, x);
        est.iterations = it + 1;
        if (norm == 0.0) {
            est.early_exact = true;
            return est;
        }
        est.rho = norm;
        scale(x, 1.0 / norm);
    }
    return est;
}

/// Operator complexity (nnz(A) + nnz(Ac)) / nnz(A) and coarsening factor |C|/n.
inline std::pair<real_t, real_t> complexity_metrics(const SparseMatrix& A, const SparseMatrix& Ac,
                                                    const CFSplit& split) {
    if (split.n() != A.n) throw std::invalid_argument("complexity_metrics: split size mismatch");
    const real_t gamma_o =
        (static_cast<real_t>(A.nnz()) + static_cast<real_t>(Ac.nnz())) / static_cast<real_t>(A.nnz());
    const real_t gamma_g =
        static_cast<real_t>(split.c_indices.size()) / static_cast<real_t>(A.n);
    return {gamma_o, gamma_g};
}

struct SolveReport {
    real_t rho = 0.0;
    real_t rho_f = 0.0;
    real_t gamma_o = 0.0;
    real_t gamma_g = 0.0;
    index_t iterations = 0;
};

struct CoarseStencilEntry {
    index_t dx, dy; // grid offset of the coarse neighbor, fine-grid units
    real_t value;   // h^2-scaled coarse operator entry
};

/// Maps one row of A_c back to 2D grid offsets around the chosen C point and
/// scales by h^2 for comparison with stencil notation.
inline std::vector<CoarseStencilEntry> extract_coarse_stencil(const TwoGridHierarchy& h,
                                                              const ProblemSpec& spec,
                                                              index_t coarse_vertex) {
    if (coarse_vertex < 0 || coarse_vertex >= h.A_coarse.n)
        throw std::invalid_argument("extract_coarse_stencil: vertex not in C");
    const index_t fine_center = h.P.coarse_to_fine[coarse_vertex];
    const auto [cx, cy] = spec.coords(fine_center);
    const real_t h2 = spec.h() * spec.h();
    std::vector<CoarseStencilEntry> out;
    for (index_t k = h.A_coarse.row_starts[coarse_vertex];
         k < h.A_coarse.row_starts[coarse_vertex + 1]; ++k) {
        const index_t fine_nb = h.P.coarse_to_fine[h.A_coarse.col_indices[k]];
        const auto [nx, ny] = spec.coords(fine_nb);
        out.push_back({nx - cx, ny - cy, h.A_coarse.values[k] * h2});
    }
    return out;
}

} // namespace bamg

#endif
