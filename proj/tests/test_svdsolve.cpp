#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "oracles.hpp"
#include "spielm/benchgen.hpp"
#include "spielm/svdsolve.hpp"

using namespace spielm;

namespace {

SvdConfig full_config(Index k = 0) {
  SvdConfig c;
  c.k = k;
  return c;
}

}  // namespace

TEST(Ritz, OneByOne) {
  const double d[] = {5.0};
  const BidiagFactorization F =
      golub_kahan(SparseMatrix::diagonal(d), Vector::Ones(1), 1, OrthoMode::full);
  const RitzTriplets t = ritz_from_bidiag(F);
  EXPECT_EQ(t.sigma[0], 5.0);
  EXPECT_EQ(t.residual[0], 0.0);
  EXPECT_TRUE(t.converged[0]);
}

TEST(Ritz, ZeroTrailingBetaMeansExact) {
  oracle::Rng rng(2);
  const SparseMatrix A = oracle::random_sparse(rng, 40, 12, 0.5);
  const BidiagFactorization F = golub_kahan(A, rng.unit_vector(12), 12, OrthoMode::full);
  ASSERT_EQ(F.trailing_beta(), 0.0);
  const RitzTriplets t = ritz_from_bidiag(F);
  EXPECT_EQ(t.residual.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.num_converged(), t.size());
}

TEST(Ritz, DiagonalMatchesOracle) {
  const double d[] = {3.0, 2.0, 1.0};
  const BidiagFactorization F = golub_kahan(SparseMatrix::diagonal(d),
                                            Vector::Ones(3) / std::sqrt(3.0), 3, OrthoMode::full);
  const RitzTriplets t = ritz_from_bidiag(F);
  const Vector oracle_s = oracle::singular_values(DenseMatrix(Vector{{3.0, 2.0, 1.0}}.asDiagonal()));
  EXPECT_LE((t.sigma - oracle_s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ritz, EmptyFactorizationThrows) {
  EXPECT_THROW(ritz_from_bidiag(BidiagFactorization{}), std::invalid_argument);
}

TEST(SparseSvd, IdentityTopTriplet) {
  SvdConfig cfg;
  cfg.num_wanted = 1;
  const RitzTriplets t = sparse_svd(SparseMatrix::identity(100), cfg);
  EXPECT_NEAR(t.sigma[0], 1.0, 1e-15);
  EXPECT_TRUE(t.converged[0]);
}

TEST(SparseSvd, RejectsInvalidConfig) {
  const SparseMatrix A = SparseMatrix::identity(3);
  SvdConfig cfg;
  cfg.k = 2;
  cfg.num_wanted = 3;
  EXPECT_THROW(sparse_svd(A, cfg), std::invalid_argument);
  cfg = SvdConfig{};
  cfg.trunc_eps = 0.0;
  EXPECT_THROW(sparse_svd(A, cfg), std::invalid_argument);
  cfg = SvdConfig{};
  cfg.conv_tol = -1.0;
  EXPECT_THROW(sparse_svd(A, cfg), std::invalid_argument);
}

TEST(SparseSvd, WideMatrixUsesTranspose) {
  oracle::Rng rng(21);
  const SparseMatrix A = oracle::random_sparse(rng, 30, 80, 0.2);
  const RitzTriplets t = sparse_svd(A, full_config());
  EXPECT_EQ(t.left.rows(), 30);
  EXPECT_EQ(t.right.rows(), 80);
  const Vector s = oracle::singular_values(A.to_dense());
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] > 1e-10 * s[0]) {
      EXPECT_NEAR(t.sigma[i], s[i], 1e-8 * s[i]);
    }
  }
  for (Index i = 0; i < 5; ++i)
    EXPECT_LE((spmv(A, t.right.col(i)) - t.sigma[i] * t.left.col(i)).norm(), 1e-9);
}

TEST(SparseSvd, RestartsLockConvergedTriplets) {
  oracle::Rng rng(22);
  const SparseMatrix A = oracle::random_sparse(rng, 300, 100, 0.1);
  const Vector s = oracle::singular_values(A.to_dense());
  SvdConfig cfg;
  cfg.k = 40;
  cfg.num_wanted = 10;
  cfg.max_restarts = 0;
  const RitzTriplets once = sparse_svd(A, cfg);
  cfg.max_restarts = 30;
  SvdTrace trace;
  const RitzTriplets many = sparse_svd(A, cfg, &trace);
  EXPECT_GE(many.num_converged(), 10);
  EXPECT_LT(once.num_converged(), 10);
  EXPECT_GT(trace.runs.size(), 1u);
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(many.sigma[i], s[i], 1e-8 * s[0]);
}

TEST(NaiveSvd, DiagonalAndDefinition) {
  const double d[] = {2.0, 3.0};
  const SparseMatrix A = SparseMatrix::diagonal(d);
  const RitzTriplets t = naive_svd(A);
  EXPECT_NEAR(t.sigma[0], 3.0, 1e-14);
  EXPECT_NEAR(t.sigma[1], 2.0, 1e-14);
  for (Index i = 0; i < 2; ++i)
    EXPECT_LE((t.left.col(i) - spmv(A, t.right.col(i)) / t.sigma[i]).norm(), 1e-10);
  EXPECT_THROW(naive_svd(SparseMatrix::identity(5), 0, 4), std::invalid_argument);
}

TEST(NaiveSvd, AgreesWithKrylov) {
  oracle::Rng rng(23);
  const SparseMatrix A = oracle::random_sparse(rng, 200, 50, 0.2);
  const RitzTriplets naive = naive_svd(A);
  const RitzTriplets krylov = sparse_svd(A, full_config(50));
  ASSERT_EQ(naive.size(), krylov.size());
  EXPECT_LE((naive.sigma - krylov.sigma).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Pinv, TruncationForced) {
  const double d[] = {2.0, 1e-20};
  SvdConfig cfg;
  cfg.trunc_eps = 1e-12;
  const SolveResult r = pinv_solve(SparseMatrix::diagonal(d), Vector{{1.0, 1.0}}, cfg);
  EXPECT_NEAR(r.beta[0], 0.5, 1e-15);
  EXPECT_NEAR(r.beta[1], 0.0, 1e-15);
  EXPECT_EQ(r.report.retained, 1);
}

TEST(Pinv, IdentityReturnsRightSide) {
  const Vector y{{0.3, -7.0, 2.5}};
  const SolveResult r = pinv_solve(SparseMatrix::identity(3), y, SvdConfig{});
  EXPECT_LE((r.beta - y).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(r.report.retained, 3);
  EXPECT_NEAR(r.report.effective_condition, 1.0, 1e-15);
}

TEST(Pinv, ErrorsAndAllTruncated) {
  EXPECT_THROW(pinv_solve(SparseMatrix::identity(3), Vector::Ones(2), SvdConfig{}),
               std::invalid_argument);
  const SparseMatrix Z = SparseMatrix::from_triplets(4, 3, {});
  const SolveResult r = pinv_solve(Z, Vector::Ones(4), SvdConfig{});
  EXPECT_TRUE(r.report.all_truncated);
  EXPECT_EQ(r.beta, Vector::Zero(3));
}

TEST(Pinv, MatchesNormalEquations) {
  oracle::Rng rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix A = oracle::random_sparse(rng, 300, 50, 0.2);
    const Vector y = rng.normal_vector(300);
    const Vector ref = oracle::normal_equations(A.to_dense(), y);
    const SolveResult r = pinv_solve(A, y, SvdConfig{});
    EXPECT_LE((r.beta - ref).norm() / ref.norm(), 1e-8);
    EXPECT_NEAR(r.report.residual_norm, (A.to_dense() * ref - y).norm(), 1e-8);
  }
}

// Property: reported residual equals ||A^T left_i - sigma_i right_i|| for converged triplets.
TEST(SvdProperty, ResidualIdentity) {
  oracle::Rng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = rng.integer(50, 200);
    const Index n = rng.integer(20, 50);
    const SparseMatrix A = oracle::random_sparse(rng, m, n, 0.1);
    SvdConfig cfg;
    cfg.k = rng.integer(5, n);
    cfg.max_restarts = 0;
    const RitzTriplets t = sparse_svd(A, cfg);
    for (Index i = 0; i < t.size(); ++i) {
      if (!t.converged[i]) continue;
      const double direct = (spmv_transpose(A, t.left.col(i)) - t.sigma[i] * t.right.col(i)).norm();
      EXPECT_NEAR(direct, t.residual[i], 1e-9);
    }
  }
}

TEST(SvdProperty, MonotoneTruncation) {
  oracle::Rng rng(26);
  const SparseMatrix A = oracle::random_sparse(rng, 80, 40, 0.1);
  const RitzTriplets t = sparse_svd(A, SvdConfig{});
  const Vector y = rng.normal_vector(80);
  Index prev = -1;
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-8, 1e-12, 1e-16}) {
    SolveReport rep;
    pinv_from_triplets(t, y, eps, &rep);
    EXPECT_GE(rep.retained, prev);
    EXPECT_GT(rep.sigma_min_retained, eps * rep.sigma_max);
    prev = rep.retained;
  }
}

TEST(SvdProperty, LeastSquaresMinimality) {
  oracle::Rng rng(27);
  const SparseMatrix A = oracle::random_sparse(rng, 60, 20, 0.3);
  const Vector y = rng.normal_vector(60);
  const SolveResult r = pinv_solve(A, y, SvdConfig{});
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = r.beta + rng.normal_vector(20) * std::pow(10.0, rng.uniform(-6, 1));
    EXPECT_LE(r.report.residual_norm, (spmv(A, x) - y).norm() + 1e-8);
  }
}

TEST(SvdProperty, RitzValuesInterlace) {
  oracle::Rng rng(28);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix A = oracle::random_sparse(rng, rng.integer(30, 150), rng.integer(10, 60), 0.15);
    const double smax = oracle::singular_values(A.to_dense())[0];
    for (OrthoMode mode : {OrthoMode::none, OrthoMode::one_sided, OrthoMode::full}) {
      SvdConfig cfg;
      cfg.mode = mode;
      cfg.k = std::min<Index>(10, std::min(A.rows(), A.cols()));
      cfg.max_restarts = 0;
      EXPECT_LE(sparse_svd(A, cfg).sigma[0], smax * (1.0 + 1e-8));
    }
  }
}

TEST(SvdProperty, NoneModeHasMoreNearDuplicates) {
  HardMatrixSpec spec{1000, 300, 60, 0.01, 1e-3, 3};
  const SparseMatrix A = gen_hard(spec);
  SvdConfig cfg;
  cfg.k = 200;
  cfg.max_restarts = 0;
  cfg.mode = OrthoMode::none;
  const RitzTriplets none = sparse_svd(A, cfg);
  cfg.mode = OrthoMode::full;
  const RitzTriplets full = sparse_svd(A, cfg);
  EXPECT_GT(count_near_duplicates(none.sigma, 1e-8), count_near_duplicates(full.sigma, 1e-8));
  EXPECT_EQ(count_near_duplicates(full.sigma, 1e-8, &full.converged), 0);
}

// Literal V_k B_k^{-1} U_k^T agrees with the SVD route when nothing is truncated.
TEST(SvdProperty, BidiagonalInverseMatchesSvdRoute) {
  oracle::Rng rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = rng.integer(10, 40);
    const SparseMatrix A = oracle::random_sparse(rng, n + rng.integer(0, 40), n, 0.4);
    const Vector s = oracle::singular_values(A.to_dense());
    if (s[n - 1] < 1e-3 * s[0]) continue;
    const BidiagFactorization F = golub_kahan(A, rng.unit_vector(n), n, OrthoMode::full);
    const Vector y = rng.normal_vector(A.rows());
    const Vector via_svd = pinv_from_triplets(ritz_from_bidiag(F), y, 1e-14);
    EXPECT_LE((bidiag_pinv_apply(F, y) - via_svd).norm(), 1e-9 * via_svd.norm());
  }
}

TEST(NearDuplicates, Counting) {
  EXPECT_EQ(count_near_duplicates(Vector{{1.0, 1.0, 1.0, 0.5}}, 1e-8), 3);
  EXPECT_EQ(count_near_duplicates(Vector{{1.0, 0.9, 0.0, 0.0}}, 1e-8), 0);
  const std::vector<bool> mask{true, false, true};
  EXPECT_EQ(count_near_duplicates(Vector{{1.0, 1.0, 0.5}}, 1e-8, &mask), 0);
}

TEST(SvdCsv, Headers) {
  const auto dir = std::filesystem::temp_directory_path() / "spielm_svd_csv";
  const SolveResult r = pinv_solve(SparseMatrix::identity(2), Vector::Ones(2), SvdConfig{});
  write_spectrum_csv(dir / "s.csv", r.triplets);
  write_solve_report_csv(dir / "r.csv", r.report);
  std::string line;
  std::ifstream s(dir / "s.csv");
  std::getline(s, line);
  EXPECT_EQ(line, "index,sigma,residual,converged");
  std::getline(s, line);
  EXPECT_EQ(line, "1,1,0,1");
  std::ifstream rr(dir / "r.csv");
  std::getline(rr, line);
  EXPECT_EQ(line, "retained,residual_norm,effective_condition");
  std::filesystem::remove_all(dir);
}
