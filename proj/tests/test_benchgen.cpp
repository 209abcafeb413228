#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "oracles.hpp"
#include "spielm/benchgen.hpp"

using namespace spielm;

namespace {

bool bit_identical(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nnz() != b.nnz()) return false;
  return std::memcmp(a.values().data(), b.values().data(), sizeof(double) * a.nnz()) == 0 &&
         std::memcmp(a.col_indices().data(), b.col_indices().data(), sizeof(Index) * a.nnz()) == 0;
}

}  // namespace

TEST(GenHard, RankOne) {
  const SparseMatrix A = gen_hard({30, 20, 1, 0.0, 0.0, 4});
  const Vector s = oracle::singular_values(A.to_dense());
  EXPECT_NEAR(s[0], 1.0, 1e-14);
  EXPECT_LT(s[1], 1e-14);
}

TEST(GenHard, ExactSpectrumWithoutNoise) {
  const SparseMatrix A = gen_hard({500, 200, 100, 0.01, 0.0, 9});
  const Vector s = oracle::singular_values(A.to_dense());
  const Vector expect = hard_spectrum(100);
  EXPECT_LE((s.head(100) - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(s.tail(100).maxCoeff(), 1e-12);
}

TEST(GenHard, PaperScalePlateau) {
  const SparseMatrix A = gen_hard({2000, 500, 100, 0.01, 1e-3, 1});
  const Vector s = oracle::singular_values(A.to_dense());
  // Rank-100 plateau well separated from the noise floor.
  EXPECT_NEAR(s[99], 0.1, 1e-3);
  EXPECT_LT(s[100], 1e-2);
  EXPECT_GT(s[100], 0.0);
}

TEST(GenHard, RejectsInvalidSpec) {
  EXPECT_THROW(gen_hard({10, 5, 6, 0.1, 1e-3, 1}), std::invalid_argument);
  EXPECT_THROW(gen_hard({10, 5, 0, 0.1, 1e-3, 1}), std::invalid_argument);
  EXPECT_THROW(gen_hard({10, 5, 2, 1.5, 1e-3, 1}), std::invalid_argument);
  EXPECT_THROW(gen_hard({10, 5, 2, 0.1, -1.0, 1}), std::invalid_argument);
}

TEST(GenHardProperty, SeedDeterminism) {
  const HardMatrixSpec spec{120, 80, 10, 0.05, 1e-3, 17};
  EXPECT_TRUE(bit_identical(gen_hard(spec), gen_hard(spec)));
  HardMatrixSpec other = spec;
  other.seed = 18;
  EXPECT_FALSE(bit_identical(gen_hard(spec), gen_hard(other)));
}

TEST(GenHardProperty, NoisePerturbationBound) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = rng.integer(10, 80);
    const Index n = rng.integer(10, 80);
    const HardMatrixSpec spec{m, n, rng.integer(1, std::min(m, n)), rng.uniform(0, 0.3),
                              std::pow(10.0, rng.uniform(-6, 0)), rng.next()};
    const HardMatrixParts parts = gen_hard_parts(spec);
    const double diff = (gen_hard(spec).to_dense() - parts.low).norm();
    EXPECT_LE(diff, spec.eps * parts.noise.frobenius_norm() * (1.0 + 1e-12) + 1e-15);
  }
}

TEST(RandomSparse, FullDensity) {
  const SparseMatrix A = gen_random_sparse(7, 9, 1.0, 3);
  EXPECT_EQ(A.nnz(), 63);
  EXPECT_EQ(A.density(), 1.0);
}

TEST(RandomSparse, Determinism) {
  EXPECT_TRUE(bit_identical(gen_random_sparse(100, 100, 0.01, 8), gen_random_sparse(100, 100, 0.01, 8)));
}

TEST(RandomSparse, ExpectedCount) {
  const SparseMatrix A = gen_random_sparse(10000, 2000, 0.001, 2);
  EXPECT_NEAR(static_cast<double>(A.nnz()), 20000.0, 200.0);
}

TEST(RandomSparse, InvalidDensity) {
  EXPECT_THROW(gen_random_sparse(3, 3, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(gen_random_sparse(3, 3, 1.5, 1), std::invalid_argument);
}

// Positions should be spread evenly across rows and columns.
TEST(RandomSparseProperty, UniformPlacement) {
  const SparseMatrix A = gen_random_sparse(200, 100, 0.1, 12);
  Vector per_col = Vector::Zero(100);
  for (Index c : A.col_indices()) per_col[c] += 1.0;
  EXPECT_GT(per_col.minCoeff(), 5.0);
  EXPECT_LT(per_col.maxCoeff(), 40.0);
}
