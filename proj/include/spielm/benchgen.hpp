#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "spielm/sparse_matrix.hpp"

namespace spielm {

/// A = A_low + eps * A_sparse with A_low = U diag(i^{-1/2}) V^T.
struct HardMatrixSpec {
  Index m = 0;
  Index n = 0;
  Index r = 0;
  double rho = 0.01;  // probability that a noise entry is nonzero
  double eps = 1e-3;
  std::uint64_t seed = kDefaultSeed;

  /// Throws std::invalid_argument unless 1 <= r <= min(m, n), 0 <= rho <= 1, eps >= 0.
  void validate() const;
};

struct HardMatrixParts {
  DenseMatrix low;     // rank r, exact singular values i^{-1/2}
  SparseMatrix noise;  // standard normal entries with probability rho
};

/// Both terms before scaling. Uses one std::mt19937_64 stream seeded by
/// spec.seed: U block, V block, then the noise scan in row-major order.
HardMatrixParts gen_hard_parts(const HardMatrixSpec& spec);

/// low + eps * noise; only entries that are exactly zero are dropped.
SparseMatrix gen_hard(const HardMatrixSpec& spec);

/// The singular values i^{-1/2}, i = 1..r.
Vector hard_spectrum(Index r);

/// Exactly round(m * n * density) nonzeros at uniformly chosen positions
/// (selection sampling), standard normal values.
/// Throws std::invalid_argument unless 0 < density <= 1.
SparseMatrix gen_random_sparse(Index m, Index n, double density, std::uint64_t seed);

std::map<std::string, std::string> to_key_values(const HardMatrixSpec& spec);

}  // namespace spielm
