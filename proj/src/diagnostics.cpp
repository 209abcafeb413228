#include "spielm/diagnostics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

MatrixDiagnostics structural(const SparseMatrix& A) {
  MatrixDiagnostics d;
  d.nrows = A.rows();
  d.ncols = A.cols();
  d.nnz = A.nnz();
  d.density = A.density();
  d.spectrum_method = "none";
  return d;
}

}  // namespace

MatrixDiagnostics diagnostics_from_spectrum(const SparseMatrix& A, const Vector& sigma,
                                            double rank_tol, std::string method) {
  MatrixDiagnostics d = structural(A);
  d.spectrum_method = std::move(method);
  d.spectrum_size = sigma.size();
  if (sigma.size() == 0) return d;
  d.max_singular = sigma.maxCoeff();
  d.smallest_computed_singular = sigma.minCoeff();
  const double cut = rank_tol * d.max_singular;
  double smin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cut) {
      ++d.numerical_rank;
      smin = std::min(smin, sigma[i]);
    }
  }
  if (d.numerical_rank > 0) {
    d.min_singular = smin;
    d.condition_number = d.max_singular / smin;
  }
  d.full_condition_number = d.smallest_computed_singular > 0.0
                                ? d.max_singular / d.smallest_computed_singular
                                : std::numeric_limits<double>::infinity();
  return d;
}

MatrixDiagnostics diagnose(const SparseMatrix& A, const DiagnoseOptions& opts) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("diagnose: empty matrix");
  if (!(opts.rank_tol > 0.0)) throw std::invalid_argument("diagnose: rank_tol must be > 0");
  if (!opts.compute_spectrum) return structural(A);

  const Index mindim = std::min(A.rows(), A.cols());
  if (mindim <= opts.dense_cap) {
    Eigen::BDCSVD<DenseMatrix> svd(A.to_dense());
    return diagnostics_from_spectrum(A, svd.singularValues(), opts.rank_tol, "dense");
  }
  SvdConfig cfg = opts.krylov;
  if (cfg.k == 0) cfg.k = std::min<Index>(200, mindim);
  const RitzTriplets t = sparse_svd(A, cfg);
  return diagnostics_from_spectrum(A, t.sigma, opts.rank_tol, "krylov");
}

void write_diagnostics_csv(const std::filesystem::path& path, const MatrixDiagnostics& d) {
  auto out = open_csv(path, "metric,value");
  out << "nrows," << d.nrows << '\n'
      << "ncols," << d.ncols << '\n'
      << "nnz," << d.nnz << '\n'
      << "density," << format_double(d.density) << '\n'
      << "spectrum_method," << d.spectrum_method << '\n';
  if (d.spectrum_method == "none") return;
  out << "spectrum_size," << d.spectrum_size << '\n'
      << "numerical_rank," << d.numerical_rank << '\n'
      << "condition_number," << format_double(d.condition_number) << '\n'
      << "min_singular," << format_double(d.min_singular) << '\n'
      << "max_singular," << format_double(d.max_singular) << '\n'
      << "smallest_computed_singular," << format_double(d.smallest_computed_singular) << '\n'
      << "full_condition_number," << format_double(d.full_condition_number) << '\n';
}

}  // namespace spielm
