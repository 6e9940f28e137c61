#ifndef BAMG_SETUP_LS_FIT_HPP
#define BAMG_SETUP_LS_FIT_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "bamg/core/sparse_matrix.hpp"
#include "bamg/setup/test_vectors.hpp"

namespace bamg {

/// Which least-squares target the fits use. The residual-corrected form
/// t_i = v_i - r_i / a_ii (one Jacobi step at i) is the production path;
/// the direct form t_i = v_i exists for comparison runs.
enum class LsForm { residual_corrected, direct };

/// Precomputed fit data for a (matrix, test vector set) pair: the targets
/// t_i^(k), the weights, and per-vertex target energies sum_k w_k t_i^2.
/// Strength measurement and interpolation share one instance, so they use
/// identical weights by construction.
struct LsFitData {
    const SparseMatrix* A = nullptr;
    const TestVectorSet* tvs = nullptr;
    std::vector<DenseVector> targets; // targets[k][i] = t_i^(k)
    DenseVector target_energy;        // per vertex
    LsForm form = LsForm::residual_corrected;

    index_t n() const { return A->n; }
    index_t k() const { return static_cast<index_t>(targets.size()); }
};

inline LsFitData make_ls_fit_data(const SparseMatrix& A, const TestVectorSet& tvs,
                                  LsForm form = LsForm::residual_corrected) {
    tvs.validate();
    if (static_cast<index_t>(tvs.vectors.front().size()) != A.n)
        throw std::invalid_argument("make_ls_fit_data: vector length != n");
    LsFitData d;
    d.A = &A;
    d.tvs = &tvs;
    d.form = form;
    d.targets.reserve(tvs.vectors.size());
    for (const DenseVector& v : tvs.vectors) {
        if (form == LsForm::direct) {
            d.targets.push_back(v);
            continue;
        }
        DenseVector r = spmv(A, v);
        DenseVector t(v.size());
        for (index_t i = 0; i < A.n; ++i) t[i] = v[i] - r[i] / A.diag(i);
        d.targets.push_back(std::move(t));
    }
    d.target_energy.assign(static_cast<std::size_t>(A.n), 0.0);
    for (std::size_t kk = 0; kk < d.targets.size(); ++kk) {
        const real_t w = tvs.weights[kk];
        for (index_t i = 0; i < A.n; ++i)
            d.target_energy[i] += w * d.targets[kk][i] * d.targets[kk][i];
    }
    return d;
}

struct OnePointFit {
    real_t p = 0.0;
    real_t ls_value = 0.0;
};

/// Weighted one-point fit of the target at i from the test-vector values at
/// j: minimizes sum_k w_k (t_i - p v_j)^2. Closed form
/// p = sum(w t_i v_j) / sum(w v_j^2); a degenerate column gives p = 0 and
/// the full target energy as the minimum.
inline OnePointFit one_point_ls_fit(const LsFitData& d, index_t i, index_t j) {
    if (i == j) throw std::invalid_argument("one_point_ls_fit: i == j");
    real_t num = 0.0, den = 0.0;
    const auto& w = d.tvs->weights;
    for (index_t kk = 0; kk < d.k(); ++kk) {
        const real_t vj = d.tvs->vectors[kk][j];
        num += w[kk] * d.targets[kk][i] * vj;
        den += w[kk] * vj * vj;
    }
    OnePointFit f;
    if (den > 0.0) f.p = num / den;
    real_t ls = 0.0;
    for (index_t kk = 0; kk < d.k(); ++kk) {
        const real_t r = d.targets[kk][i] - f.p * d.tvs->vectors[kk][j];
        ls += w[kk] * r * r;
    }
    f.ls_value = ls;
    return f;
}

/// Floor that guards the reciprocal in the algebraic distance; scaled to the
/// row's target energy so that ordering is preserved while exact fits map to
/// a finite cap.
inline real_t distance_floor(const LsFitData& d, index_t i) {
    return 1e-14 * (d.target_energy[i] + 1e-300);
}

/// Algebraic distance r_ij = 1 / max(ls, floor); large values mean strong
/// connection. The result is clamped to a finite maximum.
inline real_t algebraic_distance(const LsFitData& d, index_t i, index_t j) {
    const real_t ls = one_point_ls_fit(d, i, j).ls_value;
    const real_t r = 1.0 / std::max(ls, distance_floor(d, i));
    return std::min(r, std::numeric_limits<real_t>::max());
}

struct LsSetFit {
    std::vector<real_t> coefficients; // aligned with the given subset
    real_t ls_value = 0.0;
};

/// Weighted least-squares fit of the target at i from the test-vector values
/// on a coarse subset W: the minimizer of the |W| x |W| weighted normal
/// equations, computed through a Householder QR of the sqrt-weighted design
/// matrix (the normal equations square the conditioning of nearly collinear
/// test vectors). On rank deficiency the Gram matrix is regularized with
/// 1e-12 * trace and the reported minimum is the original functional at the
/// regularized coefficients. Requires |W| <= k.
inline LsSetFit ls_fit_set(const LsFitData& d, index_t i, std::span<const index_t> W) {
    const index_t m = static_cast<index_t>(W.size());
    const index_t k = d.k();
    if (m > k)
        throw std::invalid_argument("ls_fit_set: |W| > k (underdetermined local problem)");
    LsSetFit fit;
    fit.coefficients.assign(static_cast<std::size_t>(m), 0.0);
    if (m == 0) {
        fit.ls_value = d.target_energy[i];
        return fit;
    }

    const auto& w = d.tvs->weights;
    // sqrt-weighted design matrix B (k x m, column major) and target t
    std::vector<real_t> B(static_cast<std::size_t>(k) * m);
    std::vector<real_t> t(static_cast<std::size_t>(k));
    for (index_t kk = 0; kk < k; ++kk) {
        const real_t sw = std::sqrt(w[kk]);
        t[kk] = sw * d.targets[kk][i];
        for (index_t s = 0; s < m; ++s) B[s * k + kk] = sw * d.tvs->vectors[kk][W[s]];
    }

    // Householder QR, applying the reflections to t as we go.
    std::vector<real_t> p(static_cast<std::size_t>(m), 0.0);
    bool deficient = false;
    real_t r00 = 0.0;
    for (index_t c = 0; c < m && !deficient; ++c) {
        real_t* col = &B[c * k];
        real_t norm = 0.0;
        for (index_t r = c; r < k; ++r) norm += col[r] * col[r];
        norm = std::sqrt(norm);
        if (c == 0) r00 = norm;
        if (norm <= 1e-14 * std::max(r00, real_t(1e-300))) {
            deficient = true;
            break;
        }
        const real_t alpha = col[c] >= 0 ? -norm : norm;
        const real_t v0 = col[c] - alpha;
        real_t vnorm2 = v0 * v0;
        for (index_t r = c + 1; r < k; ++r) vnorm2 += col[r] * col[r];
        col[c] = v0; // Householder vector stored in place below the diagonal
        if (vnorm2 > 0.0) {
            for (index_t c2 = c + 1; c2 < m; ++c2) {
                real_t* col2 = &B[c2 * k];
                real_t dot_vc = 0.0;
                for (index_t r = c; r < k; ++r) dot_vc += col[r] * col2[r];
                const real_t f = 2.0 * dot_vc / vnorm2;
                for (index_t r = c; r < k; ++r) col2[r] -= f * col[r];
            }
            real_t dot_vt = 0.0;
            for (index_t r = c; r < k; ++r) dot_vt += col[r] * t[r];
            const real_t f = 2.0 * dot_vt / vnorm2;
            for (index_t r = c; r < k; ++r) t[r] -= f * col[r];
        }
        col[c] = alpha; // R diagonal
    }
    if (!deficient) {
        for (index_t r = m - 1; r >= 0; --r) {
            real_t v = t[r];
            for (index_t c = r + 1; c < m; ++c) v -= B[c * k + r] * p[c];
            p[r] = v / B[r * k + r];
        }
    } else {
        // Ridge-regularized normal equations for the degenerate case.
        std::vector<real_t> G(static_cast<std::size_t>(m) * m, 0.0);
        std::vector<real_t> g(static_cast<std::size_t>(m), 0.0);
        for (index_t kk = 0; kk < k; ++kk) {
            const real_t wk = w[kk];
            const real_t ti = d.targets[kk][i];
            for (index_t s = 0; s < m; ++s) {
                const real_t vs = d.tvs->vectors[kk][W[s]];
                g[s] += wk * ti * vs;
                for (index_t u = s; u < m; ++u) G[s * m + u] += wk * vs * d.tvs->vectors[kk][W[u]];
            }
        }
        real_t trace = 0.0;
        for (index_t s = 0; s < m; ++s) trace += G[s * m + s];
        for (index_t s = 0; s < m; ++s) G[s * m + s] += 1e-12 * trace;
        // Cholesky on the regularized Gram (symmetric part only is stored)
        for (index_t s = 0; s < m; ++s)
            for (index_t u = 0; u < s; ++u) G[s * m + u] = G[u * m + s];
        bool ok = true;
        for (index_t c = 0; c < m && ok; ++c) {
            real_t diag = G[c * m + c];
            for (index_t u = 0; u < c; ++u) diag -= G[c * m + u] * G[c * m + u];
            if (!(diag > 0.0)) {
                ok = false;
                break;
            }
            const real_t l = std::sqrt(diag);
            G[c * m + c] = l;
            for (index_t r = c + 1; r < m; ++r) {
                real_t v = G[r * m + c];
                for (index_t u = 0; u < c; ++u) v -= G[r * m + u] * G[c * m + u];
                G[r * m + c] = v / l;
            }
        }
        if (ok) {
            for (index_t r = 0; r < m; ++r) {
                real_t v = g[r];
                for (index_t u = 0; u < r; ++u) v -= G[r * m + u] * g[u];
                g[r] = v / G[r * m + r];
            }
            for (index_t r = m - 1; r >= 0; --r) {
                real_t v = g[r];
                for (index_t u = r + 1; u < m; ++u) v -= G[u * m + r] * g[u];
                g[r] = v / G[r * m + r];
            }
            p = g;
        } // fully degenerate columns keep p = 0
    }
    fit.coefficients = p;

    real_t ls = 0.0;
    for (index_t kk = 0; kk < k; ++kk) {
        real_t r = d.targets[kk][i];
        for (index_t s = 0; s < m; ++s) r -= p[s] * d.tvs->vectors[kk][W[s]];
        ls += w[kk] * r * r;
    }
    fit.ls_value = std::max(ls, 0.0);
    return fit;
}

} // namespace bamg

#endif
