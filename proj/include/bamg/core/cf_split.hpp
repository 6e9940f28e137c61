#ifndef BAMG_CORE_CF_SPLIT_HPP
#define BAMG_CORE_CF_SPLIT_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "bamg/core/types.hpp"

namespace bamg {

/// Partition of the unknowns into coarse (C) and fine (F) sets.
struct CFSplit {
    std::vector<char> is_coarse;        // per-vertex label, 1 = C, 0 = F
    std::vector<index_t> c_indices;     // sorted
    std::vector<index_t> f_indices;     // sorted

    index_t n() const { return static_cast<index_t>(is_coarse.size()); }

    void validate() const {
        if (c_indices.size() + f_indices.size() != is_coarse.size())
            throw std::invalid_argument("CFSplit: |C| + |F| != n");
        if (!std::is_sorted(c_indices.begin(), c_indices.end()) ||
            !std::is_sorted(f_indices.begin(), f_indices.end()))
            throw std::invalid_argument("CFSplit: index lists not sorted");
        for (index_t c : c_indices)
            if (c < 0 || c >= n() || !is_coarse[c])
                throw std::invalid_argument("CFSplit: c_indices inconsistent with labels");
        for (index_t f : f_indices)
            if (f < 0 || f >= n() || is_coarse[f])
                throw std::invalid_argument("CFSplit: f_indices inconsistent with labels");
    }
};

/// Builds a split from the coarse set; everything else becomes F.
inline CFSplit make_cf_split(index_t n, std::vector<index_t> coarse) {
    std::sort(coarse.begin(), coarse.end());
    coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
    CFSplit s;
    s.is_coarse.assign(static_cast<std::size_t>(n), 0);
    for (index_t c : coarse) {
        if (c < 0 || c >= n) throw std::invalid_argument("make_cf_split: index out of range");
        s.is_coarse[c] = 1;
    }
    s.c_indices = std::move(coarse);
    s.f_indices.reserve(static_cast<std::size_t>(n) - s.c_indices.size());
    for (index_t i = 0; i < n; ++i)
        if (!s.is_coarse[i]) s.f_indices.push_back(i);
    return s;
}

} // namespace bamg

#endif
