#include "spielm/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spielm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

SparseMatrix::SparseMatrix(Index nrows, Index ncols,
                           std::vector<Index> row_offsets,
                           std::vector<Index> col_indices,
                           std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(nrows_ >= 0 && ncols_ >= 0, "SparseMatrix: negative dimension");
  require(static_cast<Index>(row_offsets_.size()) == nrows_ + 1,
          "SparseMatrix: row_offsets must have nrows+1 entries");
  require(row_offsets_.front() == 0, "SparseMatrix: row_offsets[0] must be 0");
  require(col_indices_.size() == values_.size(),
          "SparseMatrix: col_indices and values differ in length");
  require(row_offsets_.back() == static_cast<Index>(values_.size()),
          "SparseMatrix: last row offset must equal the number of values");
  for (Index i = 0; i < nrows_; ++i) {
    const Index lo = row_offsets_[i];
    const Index hi = row_offsets_[i + 1];
    require(lo <= hi, "SparseMatrix: row_offsets must be non-decreasing");
    for (Index p = lo; p < hi; ++p) {
      require(col_indices_[p] >= 0 && col_indices_[p] < ncols_,
              "SparseMatrix: column index out of range");
      require(p == lo || col_indices_[p - 1] < col_indices_[p],
              "SparseMatrix: column indices must be strictly increasing");
      require(values_[p] != 0.0 && std::isfinite(values_[p]),
              "SparseMatrix: explicit zeros and non-finite values are not stored");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index nrows, Index ncols,
                                         std::vector<Triplet> entries,
                                         double drop_tol) {
  require(nrows >= 0 && ncols >= 0, "from_triplets: negative dimension");
  require(drop_tol >= 0.0, "from_triplets: drop tolerance must be >= 0");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
      throw std::out_of_range("from_triplets: entry (" + std::to_string(t.row) +
                              ", " + std::to_string(t.col) +
                              ") outside the matrix shape");
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });

  std::vector<Index> offsets(static_cast<std::size_t>(nrows) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());

  std::size_t p = 0;
  while (p < entries.size()) {
    const Index r = entries[p].row;
    const Index c = entries[p].col;
    double sum = 0.0;
    for (; p < entries.size() && entries[p].row == r && entries[p].col == c; ++p)
      sum += entries[p].value;
    if (std::abs(sum) > drop_tol) {
      cols.push_back(c);
      vals.push_back(sum);
      ++offsets[r + 1];
    }
  }
  for (Index i = 0; i < nrows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
  const auto n = static_cast<Index>(diag.size());
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (Index i = 0; i < n; ++i) t.push_back({i, i, diag[i]});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::density() const noexcept {
  if (nrows_ == 0 || ncols_ == 0) return 0.0;
  return static_cast<double>(nnz()) /
         (static_cast<double>(nrows_) * static_cast<double>(ncols_));
}

double SparseMatrix::coeff(Index i, Index j) const {
  if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_)
    throw std::out_of_range("SparseMatrix::coeff: index out of range");
  const auto first = col_indices_.begin() + row_offsets_[i];
  const auto last = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double SparseMatrix::norm1() const {
  std::vector<double> colsum(static_cast<std::size_t>(ncols_), 0.0);
  for (std::size_t p = 0; p < values_.size(); ++p)
    colsum[static_cast<std::size_t>(col_indices_[p])] += std::abs(values_[p]);
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(static_cast<std::size_t>(ncols_) + 1, 0);
  for (Index c : col_indices_) ++offsets[c + 1];
  for (Index j = 0; j < ncols_; ++j) offsets[j + 1] += offsets[j];

  std::vector<Index> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Index dst = next[col_indices_[p]]++;
      cols[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols),
                      std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix D = DenseMatrix::Zero(nrows_, ncols_);
  for (Index i = 0; i < nrows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      D(i, col_indices_[p]) = values_[p];
  return D;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (Index i = 0; i < nrows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      out.push_back({i, col_indices_[p], values_[p]});
  return out;
}

void multiply(const SparseMatrix& A, const Eigen::Ref<const Vector>& x,
              Eigen::Ref<Vector> y) {
  if (x.size() != A.cols() || y.size() != A.rows())
    throw std::invalid_argument("spmv: dimension mismatch");
  const auto offsets = A.row_offsets();
  const auto cols = A.col_indices();
  const auto vals = A.values();
  for (Index i = 0; i < A.rows(); ++i) {
    double sum = 0.0;
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
      sum += vals[p] * x[cols[p]];
    y[i] = sum;
  }
}

void multiply_transpose(const SparseMatrix& A,
                        const Eigen::Ref<const Vector>& x,
                        Eigen::Ref<Vector> y) {
  if (x.size() != A.rows() || y.size() != A.cols())
    throw std::invalid_argument("spmv_transpose: dimension mismatch");
  const auto offsets = A.row_offsets();
  const auto cols = A.col_indices();
  const auto vals = A.values();
  y.setZero();
  for (Index i = 0; i < A.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
      y[cols[p]] += vals[p] * xi;
  }
}

Vector spmv(const SparseMatrix& A, const Eigen::Ref<const Vector>& x) {
  Vector y(A.rows());
  multiply(A, x, y);
  return y;
}

Vector spmv_transpose(const SparseMatrix& A, const Eigen::Ref<const Vector>& y) {
  Vector x(A.cols());
  multiply_transpose(A, y, x);
  return x;
}

SparseMatrix sparsify(const DenseMatrix& M, double drop_tol) {
  if (drop_tol < 0.0)
    throw std::invalid_argument("sparsify: drop tolerance must be >= 0");
  std::vector<Index> offsets(static_cast<std::size_t>(M.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      if (std::abs(v) > drop_tol) {
        cols.push_back(j);
        vals.push_back(v);
      }
    }
    offsets[i + 1] = static_cast<Index>(vals.size());
  }
  return SparseMatrix(M.rows(), M.cols(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

}  // namespace spielm
