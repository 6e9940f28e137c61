#ifndef BAMG_PROBLEM_ANISOTROPIC_HPP
#define BAMG_PROBLEM_ANISOTROPIC_HPP

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "bamg/core/sparse_matrix.hpp"

namespace bamg {

/// 2D rotated anisotropic diffusion problem on the unit square with
/// homogeneous Dirichlet boundaries, discretized on an (N+1)x(N+1) uniform
/// grid. The N^2 interior points are the unknowns, in lexicographic order
/// (x fastest), with mesh width h = 1/(N+1).
struct ProblemSpec {
    index_t N = 2;        // unknowns per side
    real_t alpha = 0.0;   // rotation angle, radians
    real_t epsilon = 1.0; // anisotropy coefficient, 0 <= eps <= 1

    real_t h() const { return 1.0 / (static_cast<real_t>(N) + 1.0); }
    index_t n_unknowns() const { return N * N; }

    void validate() const {
        if (N < 2) throw std::invalid_argument("ProblemSpec: N must be >= 2");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("ProblemSpec: epsilon must be in [0,1]");
        if (!(alpha >= -6.2832 && alpha < 6.2832))
            throw std::invalid_argument("ProblemSpec: alpha out of range");
    }

    index_t vertex(index_t ix, index_t iy) const { return iy * N + ix; }
    std::pair<index_t, index_t> coords(index_t v) const { return {v % N, v / N}; }
};

/// Coefficients of a u_xx + b u_xy + c u_yy for rotation alpha and ratio eps.
inline std::tuple<real_t, real_t, real_t> anisotropy_coefficients(real_t alpha, real_t epsilon) {
    const real_t s = std::sin(alpha), c = std::cos(alpha);
    const real_t a = c * c + epsilon * s * s;
    const real_t b = (1.0 - epsilon) * std::sin(2.0 * alpha);
    const real_t cc = s * s + epsilon * c * c;
    return {a, b, cc};
}

/// Seven-point stencil weights for A = -L_h, in units of 1/h^2. The cross
/// derivative always uses the NE/SW corners (the fixed orientation, kept
/// even when it opposes the anisotropy direction).
struct Stencil7 {
    real_t center, east, west, north, south, northeast, southwest;
    real_t h = 1.0;
};

inline Stencil7 assemble_stencil(const ProblemSpec& spec) {
    spec.validate();
    auto [a, b, c] = anisotropy_coefficients(spec.alpha, spec.epsilon);
    const real_t h = spec.h();
    const real_t inv_h2 = 1.0 / (h * h);
    Stencil7 s;
    s.h = h;
    s.center = (2.0 * a + 2.0 * c - b) * inv_h2;
    s.east = s.west = (-a + 0.5 * b) * inv_h2;
    s.north = s.south = (-c + 0.5 * b) * inv_h2;
    s.northeast = s.southwest = (-0.5 * b) * inv_h2;
    return s;
}

/// Assembles the N^2 x N^2 operator. Stencil legs leaving the grid are
/// dropped (Dirichlet elimination, the diagonal keeps the full center
/// value). Legs below 1e-14 * |center| are treated as exact zeros so that
/// rotation angles whose coefficients cancel analytically do not leave
/// roundoff-sized couplings in the sparsity pattern.
inline SparseMatrix assemble_matrix(const ProblemSpec& spec) {
    spec.validate();
    const Stencil7 s = assemble_stencil(spec);
    const index_t N = spec.N;
    const real_t snap = 1e-14 * std::fabs(s.center);

    struct Leg {
        index_t dx, dy;
        real_t w;
    };
    const Leg legs[] = {{1, 0, s.east},      {-1, 0, s.west},      {0, 1, s.north},
                        {0, -1, s.south},    {1, 1, s.northeast},  {-1, -1, s.southwest}};

    std::vector<std::tuple<index_t, index_t, real_t>> trips;
    trips.reserve(static_cast<std::size_t>(7) * N * N);
    for (index_t iy = 0; iy < N; ++iy) {
        for (index_t ix = 0; ix < N; ++ix) {
            const index_t i = spec.vertex(ix, iy);
            trips.push_back({i, i, s.center});
            for (const Leg& l : legs) {
                if (std::fabs(l.w) <= snap) continue;
                const index_t jx = ix + l.dx, jy = iy + l.dy;
                if (jx < 0 || jx >= N || jy < 0 || jy >= N) continue;
                trips.push_back({i, spec.vertex(jx, jy), l.w});
            }
        }
    }
    return matrix_from_triplets(spec.n_unknowns(), std::move(trips), /*symmetric_hint=*/true);
}

} // namespace bamg

#endif
