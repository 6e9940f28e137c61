#ifndef BAMG_IO_MATRIX_MARKET_HPP
#define BAMG_IO_MATRIX_MARKET_HPP

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bamg/core/sparse_matrix.hpp"

namespace bamg {

/// Reads a Matrix Market coordinate file (real, general or symmetric).
/// Symmetric storage is expanded to the full pattern.
inline SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_market: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_matrix_market: empty file");
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
        throw std::runtime_error("read_matrix_market: unsupported header: " + line);
    if (field != "real" && field != "integer")
        throw std::runtime_error("read_matrix_market: unsupported field " + field);
    const bool symmetric = (symmetry == "symmetric");
    if (!symmetric && symmetry != "general")
        throw std::runtime_error("read_matrix_market: unsupported symmetry " + symmetry);

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream dims(line);
    long rows = 0, cols = 0, entries = 0;
    dims >> rows >> cols >> entries;
    if (rows != cols) throw std::runtime_error("read_matrix_market: matrix not square");

    std::vector<std::tuple<index_t, index_t, real_t>> trips;
    trips.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    for (long e = 0; e < entries; ++e) {
        long i = 0, j = 0;
        real_t v = 0.0;
        if (!(in >> i >> j >> v)) throw std::runtime_error("read_matrix_market: truncated data");
        trips.push_back({static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v});
        if (symmetric && i != j)
            trips.push_back({static_cast<index_t>(j - 1), static_cast<index_t>(i - 1), v});
    }
    return matrix_from_triplets(static_cast<index_t>(rows), std::move(trips), symmetric);
}

/// Writes the full coordinate pattern as "real general" with 1-based indices.
inline void write_matrix_market(const SparseMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.n << " " << A.n << " " << A.nnz() << "\n";
    char buf[64];
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, A.col_indices[k] + 1,
                          A.values[k]);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("write_matrix_market: write failed");
}

} // namespace bamg

#endif
