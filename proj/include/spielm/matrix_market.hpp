#pragma once

#include <filesystem>
#include <iosfwd>

#include "spielm/sparse_matrix.hpp"

namespace spielm {

/// Reads a Matrix Market coordinate file with a real field and general or
/// symmetric structure. Symmetric files are expanded (off-diagonal entries
/// mirrored). Duplicate coordinates are summed; explicit zeros are dropped.
/// Throws std::runtime_error on malformed input or unsupported fields.
SparseMatrix read_matrix_market(const std::filesystem::path& path);
SparseMatrix read_matrix_market(std::istream& in);

/// Writes `coordinate real general`, one entry per stored value in row order.
/// Values use the shortest representation that round-trips exactly.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A);
void write_matrix_market(std::ostream& out, const SparseMatrix& A);

}  // namespace spielm
