#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "spielm/matrix_market.hpp"

using namespace spielm;

namespace {

SparseMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

}  // namespace

TEST(MatrixMarket, ReadsIdentity) {
  const SparseMatrix A = parse(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n");
  EXPECT_EQ(A.to_dense(), DenseMatrix::Identity(2, 2));
}

TEST(MatrixMarket, MirrorsSymmetricEntries) {
  const SparseMatrix A =
      parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4.0\n2 1 3.0\n");
  EXPECT_EQ(A.nnz(), 3);
  EXPECT_EQ(A.coeff(1, 0), 3.0);
  EXPECT_EQ(A.coeff(0, 1), 3.0);
  EXPECT_EQ(A.coeff(0, 0), 4.0);
}

TEST(MatrixMarket, RejectsMalformedInput) {
  EXPECT_THROW(parse(""), std::runtime_error);
  EXPECT_THROW(parse("%%NotMarket matrix coordinate real general\n1 1 0\n"), std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate complex general\n1 1 0\n"),
               std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 0\n"),
               std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate integer general\n1 1 0\n"),
               std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n1 1\n1.0\n"), std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
               std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
               std::runtime_error);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\nx y z\n"),
               std::runtime_error);
  EXPECT_THROW(read_matrix_market(std::filesystem::path("/nonexistent/file.mtx")),
               std::runtime_error);
}

TEST(MatrixMarket, SumsDuplicatesDropsZeros) {
  const SparseMatrix A = parse(
      "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n1 1 1.5\n2 2 0\n");
  EXPECT_EQ(A.nnz(), 1);
  EXPECT_EQ(A.coeff(0, 0), 3.0);
}

// Property: write then read reproduces the stored triple set exactly.
TEST(MatrixMarketProperty, WriteReadIsIdempotent) {
  oracle::Rng rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const SparseMatrix A =
        oracle::random_sparse(rng, rng.integer(1, 40), rng.integer(1, 40), rng.uniform(0, 0.5));
    std::stringstream first;
    write_matrix_market(first, A);
    const SparseMatrix B = read_matrix_market(first);
    std::stringstream second;
    write_matrix_market(second, B);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(A.rows(), B.rows());
    EXPECT_EQ(A.cols(), B.cols());
    ASSERT_EQ(A.nnz(), B.nnz());
    for (Index p = 0; p < A.nnz(); ++p) {
      EXPECT_EQ(A.col_indices()[p], B.col_indices()[p]);
      EXPECT_EQ(A.values()[p], B.values()[p]);
    }
  }
}

TEST(MatrixMarket, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "spielm_mm_test";
  const SparseMatrix A = SparseMatrix::from_triplets(3, 4, {{0, 3, 0.1}, {2, 0, -1e-300}});
  write_matrix_market(dir / "a.mtx", A);
  const SparseMatrix B = read_matrix_market(dir / "a.mtx");
  EXPECT_EQ(B.coeff(0, 3), 0.1);
  EXPECT_EQ(B.coeff(2, 0), -1e-300);
  std::filesystem::remove_all(dir);
}
