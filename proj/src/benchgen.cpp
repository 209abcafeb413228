#include "spielm/benchgen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

DenseMatrix gaussian_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = normal(rng);
  return G;
}

DenseMatrix orthonormal_columns(Index rows, Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<DenseMatrix> qr(gaussian_block(rows, cols, rng));
  return qr.householderQ() * DenseMatrix::Identity(rows, cols);
}

}  // namespace

void HardMatrixSpec::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_hard: m and n must be positive");
  if (r < 1 || r > std::min(m, n))
    throw std::invalid_argument("gen_hard: rank must lie in [1, min(m, n)]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("gen_hard: rho must lie in [0, 1]");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("gen_hard: eps must be >= 0");
}

Vector hard_spectrum(Index r) {
  Vector s(r);
  for (Index i = 0; i < r; ++i) s[i] = 1.0 / std::sqrt(static_cast<double>(i + 1));
  return s;
}

HardMatrixParts gen_hard_parts(const HardMatrixSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const DenseMatrix U = orthonormal_columns(spec.m, spec.r, rng);
  const DenseMatrix V = orthonormal_columns(spec.n, spec.r, rng);

  HardMatrixParts parts;
  parts.low = U * hard_spectrum(spec.r).asDiagonal() * V.transpose();

  std::bernoulli_distribution coin(spec.rho);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Triplet> noise;
  for (Index i = 0; i < spec.m; ++i)
    for (Index j = 0; j < spec.n; ++j)
      if (coin(rng)) noise.push_back({i, j, normal(rng)});
  parts.noise = SparseMatrix::from_triplets(spec.m, spec.n, std::move(noise));
  return parts;
}

SparseMatrix gen_hard(const HardMatrixSpec& spec) {
  HardMatrixParts parts = gen_hard_parts(spec);
  DenseMatrix A = std::move(parts.low);
  if (spec.eps != 0.0)
    for (const auto& t : parts.noise.triplets()) A(t.row, t.col) += spec.eps * t.value;
  return sparsify(A, 0.0);
}

SparseMatrix gen_random_sparse(Index m, Index n, double density, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_random_sparse: m and n must be positive");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("gen_random_sparse: density must lie in (0, 1]");
  const auto total = static_cast<long long>(m) * static_cast<long long>(n);
  const auto want = static_cast<long long>(std::llround(static_cast<double>(total) * density));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Index> offsets(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<std::size_t>(want));
  vals.reserve(static_cast<std::size_t>(want));

  // Selection sampling: position t is taken with probability
  // (still needed) / (still unseen), which yields exactly `want` picks.
  long long picked = 0;
  for (long long t = 0; t < total && picked < want; ++t) {
    if (static_cast<double>(total - t) * unif(rng) < static_cast<double>(want - picked)) {
      double v = 0.0;
      while (v == 0.0) v = normal(rng);
      cols.push_back(static_cast<Index>(t % n));
      vals.push_back(v);
      ++offsets[static_cast<std::size_t>(t / n) + 1];
      ++picked;
    }
  }
  for (Index i = 0; i < m; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

std::map<std::string, std::string> to_key_values(const HardMatrixSpec& spec) {
  return {{"kind", "hard"},
          {"m", std::to_string(spec.m)},
          {"n", std::to_string(spec.n)},
          {"rank", std::to_string(spec.r)},
          {"rho", format_double(spec.rho)},
          {"eps", format_double(spec.eps)},
          {"seed", std::to_string(spec.seed)}};
}

}  // namespace spielm
