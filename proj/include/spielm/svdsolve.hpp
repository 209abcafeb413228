#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spielm/bidiag.hpp"
#include "spielm/sparse_matrix.hpp"

namespace spielm {

struct RitzTriplets {
  Vector sigma;       // descending
  DenseMatrix left;   // m x p
  DenseMatrix right;  // n x p
  Vector residual;    // beta_k |e_k^T u~_i|
  std::vector<bool> converged;

  Index size() const { return sigma.size(); }
  Index num_converged() const;
};

struct SvdConfig {
  Index k = 0;           // subspace size; 0 selects min(m, n)
  Index num_wanted = 0;  // 0 selects k
  double conv_tol = 1e-10;
  Index max_restarts = 20;
  OrthoMode mode = OrthoMode::full;
  double trunc_eps = 1e-12;
  std::uint64_t seed = kDefaultSeed;
  double breakdown_tol = -1.0;  // < 0: 1e-14 * ||A||_F

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Triplets from the SVD of B_k. converged[i] <=> residual[i] <= conv_tol * sigma[0].
/// Throws std::invalid_argument if F.k == 0.
RitzTriplets ritz_from_bidiag(const BidiagFactorization& F, double conv_tol = 1e-10);

/// Per-run bookkeeping of the restarted driver.
struct SvdRunInfo {
  Index k = 0;
  std::optional<Index> breakdown_at;
  Index newly_locked = 0;
  double max_sigma = 0.0;
};

struct SvdTrace {
  std::vector<SvdRunInfo> runs;
  std::vector<TraceRow> first_run;  // per-iteration trace of the first run
};

/// Restarted Krylov SVD. Converged triplets are locked and deflated; each
/// restart begins from the sum of the still-wanted unconverged Ritz right
/// vectors (a seeded random vector on the first run), projected away from the
/// locked right vectors. Unconverged results are returned with honest flags rather
/// than raised as errors. Wide matrices are handled through A^T.
RitzTriplets sparse_svd(const SparseMatrix& A, const SvdConfig& cfg,
                        SvdTrace* trace = nullptr);

/// Test oracle: dense eigendecomposition of A^T A (A A^T when wide),
/// sigma_i = sqrt(lambda_i), u_i = A v_i / sigma_i. num_wanted = 0 keeps all.
/// Throws std::invalid_argument when min(m, n) > cap.
RitzTriplets naive_svd(const SparseMatrix& A, Index num_wanted = 0, Index cap = 2000);

struct SolveReport {
  Index retained = 0;
  double residual_norm = 0.0;        // ||A beta - y||_2
  double effective_condition = 0.0;  // sigma_max / smallest retained sigma
  double sigma_max = 0.0;
  double sigma_min_retained = 0.0;
  Index num_triplets = 0;
  Index num_converged = 0;
  bool all_truncated = false;  // beta is zero
};

struct SolveResult {
  Vector beta;
  SolveReport report;
  RitzTriplets triplets;
};

/// beta = sum over sigma_i > eps * sigma_max of right_i (left_i^T y) / sigma_i.
/// Throws std::invalid_argument on a length mismatch between y and left.
Vector pinv_from_triplets(const RitzTriplets& t, const Vector& y, double eps,
                          SolveReport* report = nullptr);

SolveResult pinv_solve(const SparseMatrix& A, const Vector& y, const SvdConfig& cfg);

/// V_k B_k^{-1} U_k^T y by back substitution on the bidiagonal.
/// Throws std::domain_error if B_k has a zero diagonal entry.
Vector bidiag_pinv_apply(const BidiagFactorization& F, const Vector& y);

/// Number of index pairs i < j with |s_i - s_j| < rel_gap * max(s_i, s_j),
/// over entries with s > min_sigma (and mask[i] true when a mask is given).
Index count_near_duplicates(const Vector& sigma, double rel_gap,
                            const std::vector<bool>* mask = nullptr,
                            double min_sigma = 0.0);

/// `index,sigma,residual,converged` with 1-based index.
void write_spectrum_csv(const std::filesystem::path& path, const RitzTriplets& t);
/// `retained,residual_norm,effective_condition`
void write_solve_report_csv(const std::filesystem::path& path, const SolveReport& r);

}  // namespace spielm
