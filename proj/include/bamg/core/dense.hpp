#ifndef BAMG_CORE_DENSE_HPP
#define BAMG_CORE_DENSE_HPP

#include <cmath>
#include <stdexcept>

#include "bamg/core/types.hpp"

namespace bamg {

inline bool all_finite(const DenseVector& x) {
    for (real_t v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline real_t norm2(const DenseVector& x) {
    real_t s = 0.0;
    for (real_t v : x) s += v * v;
    return std::sqrt(s);
}

inline real_t norm_inf(const DenseVector& x) {
    real_t m = 0.0;
    for (real_t v : x) m = std::max(m, std::fabs(v));
    return m;
}

inline real_t dot(const DenseVector& x, const DenseVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    real_t s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// y += a*x
inline void axpy(real_t a, const DenseVector& x, DenseVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(DenseVector& x, real_t a) {
    for (real_t& v : x) v *= a;
}

} // namespace bamg

#endif
