#ifndef BAMG_CORE_RNG_HPP
#define BAMG_CORE_RNG_HPP

#include <bit>
#include <cstdint>
#include <random>

#include "bamg/core/types.hpp"

namespace bamg {

/// splitmix64 finalizer; used to derive independent seed streams from a
/// master seed and a handful of tag values.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

inline std::uint64_t seed_tag(double x) { return std::bit_cast<std::uint64_t>(x); }

/// Deterministic RNG. mt19937_64 is fully specified by the standard, and the
/// uniform mappings below avoid std::uniform_real_distribution (whose output
/// is implementation-defined), so streams are reproducible across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// uniform on (0,1]
    real_t uniform_pos() {
        const std::uint64_t bits = eng_() >> 11; // 53 random bits
        return 1.0 - static_cast<real_t>(bits) * 0x1.0p-53;
    }

    DenseVector uniform_pos_vector(index_t n) {
        DenseVector v(static_cast<std::size_t>(n));
        for (auto& x : v) x = uniform_pos();
        return v;
    }

    std::uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

} // namespace bamg

#endif
