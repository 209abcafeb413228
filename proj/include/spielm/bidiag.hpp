#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "spielm/sparse_matrix.hpp"

namespace spielm {

enum class OrthoMode { none, full, one_sided };

/// Accepts "none", "full", "one_sided" and "one-sided".
OrthoMode parse_ortho_mode(std::string_view name);
std::string_view to_string(OrthoMode mode);

/// One iteration of the bidiagonalization, for the optional trace CSV.
struct TraceRow {
  Index j = 0;  // 1-based step
  double alpha = 0.0;
  double beta = 0.0;
  double u_defect = 0.0;  // ||I - U_j^T U_j||_F after step j
  double v_defect = 0.0;  // same for V_j
};

struct BidiagFactorization {
  DenseMatrix U;  // m x k
  DenseMatrix V;  // n x k
  Vector alpha;   // diagonal of B_k
  /// beta[j] couples v_{j+1}: beta[0..k-2] is the superdiagonal of B_k and
  /// beta[k-1] the trailing scalar of the residual term.
  Vector beta;
  Vector v_next;  // unit, or zero after breakdown
  Index k = 0;
  std::optional<Index> breakdown_at;  // 1-based step
  std::vector<TraceRow> trace;

  double trailing_beta() const { return k > 0 ? beta[k - 1] : 0.0; }
  /// k x k upper bidiagonal B_k.
  DenseMatrix bidiagonal() const;
};

struct GolubKahanOptions {
  /// Negative selects 1e-14 * ||A||_F.
  double breakdown_tol = -1.0;
  bool record_trace = false;
  /// Previously converged singular vectors. New u's and v's are always kept
  /// orthogonal to these, independently of the mode.
  const DenseMatrix* locked_left = nullptr;
  const DenseMatrix* locked_right = nullptr;
};

/// k steps of Golub-Kahan bidiagonalization started from the unit vector v1.
/// Stops early (breakdown_at set) when alpha_j or beta_j <= breakdown_tol.
/// Throws std::invalid_argument if k is outside [1, min(m, n)] or v1 is not
/// unit length within 1e-12.
BidiagFactorization golub_kahan(const SparseMatrix& A, const Vector& v1, Index k,
                                OrthoMode mode, const GolubKahanOptions& opts = {});

struct LanczosResult {
  DenseMatrix V;    // n x k
  Vector diag;      // length k
  Vector offdiag;   // length k - 1
  Index k = 0;
  std::optional<Index> breakdown_at;

  DenseMatrix T() const;
};

/// Symmetric Lanczos with full reorthogonalization on x -> A^T (A x); A^T A is
/// never formed. breakdown_tol < 0 selects 1e-14 * ||A||_F^2.
LanczosResult lanczos_tridiag(const SparseMatrix& A, const Vector& v1, Index k,
                              double breakdown_tol = -1.0);

/// ||I - Q^T Q||_F
double orthogonality_defect(const DenseMatrix& Q);

/// Deterministic Gaussian unit vector.
Vector default_start_vector(Index n, std::uint64_t seed);

struct RecurrenceResiduals {
  double right = 0.0;  // ||A V - U B||_F
  double left = 0.0;   // ||A^T U - V B^T - beta_k v_{k+1} e_k^T||_F
};
RecurrenceResiduals recurrence_residuals(const SparseMatrix& A,
                                         const BidiagFactorization& F);

/// `j,alpha,beta,u_defect,v_defect`
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace);

}  // namespace spielm
