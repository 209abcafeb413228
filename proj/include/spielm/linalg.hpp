#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace spielm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
/// Column-major dense storage; Lanczos bases keep each basis vector contiguous.
using DenseMatrix = Eigen::MatrixXd;

/// Seed used whenever the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 20240611ULL;

}  // namespace spielm
