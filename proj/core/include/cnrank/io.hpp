#pragma once

#include <filesystem>

#include "cnrank/sparse.hpp"

namespace cnrank {

// Plain-text triplet format shared by all matrix files: first line
// "<n_rows> <n_cols>", then one "r c v" line per stored entry, rows ascending
// and columns ascending within a row. Sparse files store nonzeros only;
// dense files store every cell. Writers are byte-deterministic.

void write_matrix(const std::filesystem::path& path, const SparseBinaryMatrix& m);
void write_matrix(const std::filesystem::path& path, const SparseTernaryMatrix& m);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);

SparseBinaryMatrix read_binary_matrix(const std::filesystem::path& path);
SparseTernaryMatrix read_ternary_matrix(const std::filesystem::path& path);
DenseMatrix read_dense_matrix(const std::filesystem::path& path);

}  // namespace cnrank
