#ifndef BAMG_CORE_TYPES_HPP
#define BAMG_CORE_TYPES_HPP

#include <cstdint>
#include <vector>

namespace bamg {

using index_t = std::int32_t;
using real_t = double;

/// Dense vector of doubles; the library convention is that entries are finite
/// (no NaN/Inf) unless a function documents otherwise.
using DenseVector = std::vector<real_t>;

} // namespace bamg

#endif
