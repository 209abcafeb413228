#pragma once

#include <filesystem>
#include <string>

#include "spielm/sparse_matrix.hpp"
#include "spielm/svdsolve.hpp"

namespace spielm {

struct MatrixDiagnostics {
  Index nrows = 0;
  Index ncols = 0;
  Index nnz = 0;
  double density = 0.0;
  Index numerical_rank = 0;
  /// max_singular / min_singular over the retained values (sigma > rank_tol * sigma_max).
  double condition_number = 0.0;
  double min_singular = 0.0;  // smallest retained
  double max_singular = 0.0;
  /// Smallest value in the computed spectrum, retained or not.
  double smallest_computed_singular = 0.0;
  /// max_singular / smallest_computed_singular; inf when the latter is zero.
  double full_condition_number = 0.0;
  Index spectrum_size = 0;
  std::string spectrum_method;  // "dense", "krylov" or "none"
};

struct DiagnoseOptions {
  double rank_tol = 1e-12;
  Index dense_cap = 2000;
  /// Used when min(m, n) > dense_cap. k = 0 selects min(200, min(m, n)).
  SvdConfig krylov = [] {
    SvdConfig c;
    c.max_restarts = 3;
    return c;
  }();
  bool compute_spectrum = true;
};

/// Structural fields always; spectral fields from a dense SVD when
/// min(m, n) <= dense_cap and from sparse_svd otherwise.
/// Throws std::invalid_argument on an empty matrix or rank_tol <= 0.
MatrixDiagnostics diagnose(const SparseMatrix& A, const DiagnoseOptions& opts = {});

/// Fills the spectral fields from a precomputed spectrum (any order).
MatrixDiagnostics diagnostics_from_spectrum(const SparseMatrix& A, const Vector& sigma,
                                            double rank_tol, std::string method);

/// `metric,value`
void write_diagnostics_csv(const std::filesystem::path& path, const MatrixDiagnostics& d);

}  // namespace spielm
