#pragma once

#include <span>
#include <vector>

#include "spielm/linalg.hpp"

namespace spielm {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix.
///
/// Immutable after construction. Column indices are strictly increasing
/// within each row and no stored value has magnitude at or below the drop
/// tolerance used to build it (explicit zeros are never stored).
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Adopts CSR arrays after validating every structural invariant.
  /// Throws std::invalid_argument on violation.
  SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  /// Builds from unordered coordinates. Duplicates are summed, then entries
  /// with |value| <= drop_tol are discarded.
  static SparseMatrix from_triplets(Index nrows, Index ncols,
                                    std::vector<Triplet> entries,
                                    double drop_tol = 0.0);

  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> diag);

  Index rows() const noexcept { return nrows_; }
  Index cols() const noexcept { return ncols_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
  /// nnz / (rows * cols); zero for an empty shape.
  double density() const noexcept;

  std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Index> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Stored value at (i, j), or 0.
  double coeff(Index i, Index j) const;

  double frobenius_norm() const;
  /// Maximum absolute column sum.
  double norm1() const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::vector<Triplet> triplets() const;

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

/// y = A x. Rows are reduced sequentially in storage order.
void multiply(const SparseMatrix& A, const Eigen::Ref<const Vector>& x,
              Eigen::Ref<Vector> y);

/// y = A^T x by column accumulation over the CSR storage; no transpose copy.
void multiply_transpose(const SparseMatrix& A,
                        const Eigen::Ref<const Vector>& x,
                        Eigen::Ref<Vector> y);

Vector spmv(const SparseMatrix& A, const Eigen::Ref<const Vector>& x);
Vector spmv_transpose(const SparseMatrix& A, const Eigen::Ref<const Vector>& y);

/// Keeps entries of M with |value| > drop_tol.
SparseMatrix sparsify(const DenseMatrix& M, double drop_tol);

}  // namespace spielm
