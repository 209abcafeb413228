#include "spielm/bidiag.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// One classical Gram-Schmidt sweep against the leading `cols` columns of Q.
void project_out(Eigen::Ref<Vector> w, const DenseMatrix& Q, Index cols) {
  if (cols == 0) return;
  const auto block = Q.leftCols(cols);
  const Vector c = block.transpose() * w;
  w.noalias() -= block * c;
}

// Gram-Schmidt against the prior basis and the locked vectors, with one extra
// sweep when the first sweep leaves less than 1/sqrt(2) of the norm.
void orthogonalize(Eigen::Ref<Vector> w, const DenseMatrix* basis, Index cols,
                   const DenseMatrix* locked) {
  const Index locked_cols = locked ? locked->cols() : 0;
  if ((basis == nullptr || cols == 0) && locked_cols == 0) return;
  const double before = w.norm();
  for (int pass = 0; pass < 2; ++pass) {
    if (locked_cols > 0) project_out(w, *locked, locked_cols);
    if (basis != nullptr) project_out(w, *basis, cols);
    if (pass == 0 && w.norm() >= kInvSqrt2 * before) break;
  }
}

// Squared defect increment from appending q to the leading `cols` columns.
double defect_increment(const DenseMatrix& Q, Index cols, const Vector& q) {
  const double diag = 1.0 - q.squaredNorm();
  double off = 0.0;
  if (cols > 0) off = (Q.leftCols(cols).transpose() * q).squaredNorm();
  return 2.0 * off + diag * diag;
}

void check_start(const SparseMatrix& A, const Vector& v1, Index k) {
  const Index mindim = std::min(A.rows(), A.cols());
  if (k < 1 || k > mindim)
    throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " +
                                std::to_string(mindim) + "]");
  if (v1.size() != A.cols())
    throw std::invalid_argument("start vector length does not match A.cols()");
  if (std::abs(v1.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("start vector must have unit 2-norm");
}

}  // namespace

OrthoMode parse_ortho_mode(std::string_view name) {
  if (name == "none") return OrthoMode::none;
  if (name == "full") return OrthoMode::full;
  if (name == "one_sided" || name == "one-sided") return OrthoMode::one_sided;
  throw std::invalid_argument("unknown orthogonalization mode '" + std::string(name) +
                              "' (expected none, full or one-sided)");
}

std::string_view to_string(OrthoMode mode) {
  switch (mode) {
    case OrthoMode::none: return "none";
    case OrthoMode::full: return "full";
    case OrthoMode::one_sided: return "one-sided";
  }
  return "unknown";
}

DenseMatrix BidiagFactorization::bidiagonal() const {
  DenseMatrix B = DenseMatrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    B(j, j) = alpha[j];
    if (j + 1 < k) B(j, j + 1) = beta[j];
  }
  return B;
}

BidiagFactorization golub_kahan(const SparseMatrix& A, const Vector& v1, Index k,
                                OrthoMode mode, const GolubKahanOptions& opts) {
  check_start(A, v1, k);
  const Index m = A.rows();
  const Index n = A.cols();
  const double tol =
      opts.breakdown_tol >= 0.0 ? opts.breakdown_tol : 1e-14 * A.frobenius_norm();
  const bool ortho_u = mode == OrthoMode::full;
  const bool ortho_v = mode == OrthoMode::full || mode == OrthoMode::one_sided;

  BidiagFactorization F;
  F.U = DenseMatrix::Zero(m, k);
  F.V = DenseMatrix::Zero(n, k);
  F.alpha = Vector::Zero(k);
  F.beta = Vector::Zero(k);
  F.v_next = Vector::Zero(n);
  F.V.col(0) = v1;

  double u_defect2 = 0.0;
  double v_defect2 = opts.record_trace ? defect_increment(F.V, 0, v1) : 0.0;

  Vector u(m);
  Vector v(n);
  Index steps = k;
  for (Index j = 0; j < k; ++j) {
    multiply(A, F.V.col(j), u);
    if (j > 0) u -= F.beta[j - 1] * F.U.col(j - 1);
    orthogonalize(u, ortho_u ? &F.U : nullptr, j, opts.locked_left);

    double alpha = u.norm();
    if (alpha <= tol) {
      // A v_j already lies in the span of the previous left vectors.
      F.alpha[j] = 0.0;
      F.beta[j] = 0.0;
      F.breakdown_at = j + 1;
      if (opts.record_trace) {
        u_defect2 += defect_increment(F.U, j, F.U.col(j));
        F.trace.push_back({j + 1, 0.0, 0.0, std::sqrt(u_defect2), std::sqrt(v_defect2)});
      }
      steps = j + 1;
      break;
    }
    F.alpha[j] = alpha;
    F.U.col(j) = u / alpha;

    multiply_transpose(A, F.U.col(j), v);
    v -= alpha * F.V.col(j);
    orthogonalize(v, ortho_v ? &F.V : nullptr, j + 1, opts.locked_right);

    const double beta = v.norm();
    if (opts.record_trace) u_defect2 += defect_increment(F.U, j, F.U.col(j));
    if (beta <= tol) {
      F.beta[j] = 0.0;
      F.breakdown_at = j + 1;
      if (opts.record_trace)
        F.trace.push_back({j + 1, alpha, 0.0, std::sqrt(u_defect2), std::sqrt(v_defect2)});
      steps = j + 1;
      break;
    }
    F.beta[j] = beta;
    if (j + 1 < k) {
      F.V.col(j + 1) = v / beta;
      if (opts.record_trace) v_defect2 += defect_increment(F.V, j + 1, F.V.col(j + 1));
    } else {
      F.v_next = v / beta;
    }
    if (opts.record_trace)
      F.trace.push_back({j + 1, alpha, beta, std::sqrt(u_defect2), std::sqrt(v_defect2)});
  }

  if (steps < k) {
    F.U.conservativeResize(Eigen::NoChange, steps);
    F.V.conservativeResize(Eigen::NoChange, steps);
    F.alpha.conservativeResize(steps);
    F.beta.conservativeResize(steps);
  }
  F.k = steps;
  return F;
}

DenseMatrix LanczosResult::T() const {
  DenseMatrix t = DenseMatrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    t(j, j) = diag[j];
    if (j + 1 < k) t(j, j + 1) = t(j + 1, j) = offdiag[j];
  }
  return t;
}

LanczosResult lanczos_tridiag(const SparseMatrix& A, const Vector& v1, Index k,
                              double breakdown_tol) {
  check_start(A, v1, k);
  const Index n = A.cols();
  const double fro = A.frobenius_norm();
  const double tol = breakdown_tol >= 0.0 ? breakdown_tol : 1e-14 * fro * fro;

  LanczosResult L;
  L.V = DenseMatrix::Zero(n, k);
  L.diag = Vector::Zero(k);
  L.offdiag = Vector::Zero(std::max<Index>(k - 1, 0));
  L.V.col(0) = v1;

  Vector Av(A.rows());
  Vector w(n);
  Index steps = k;
  for (Index j = 0; j < k; ++j) {
    multiply(A, L.V.col(j), Av);
    multiply_transpose(A, Av, w);
    if (j > 0) w -= L.offdiag[j - 1] * L.V.col(j - 1);
    L.diag[j] = L.V.col(j).dot(w);
    w -= L.diag[j] * L.V.col(j);
    orthogonalize(w, &L.V, j + 1, nullptr);
    if (j + 1 == k) break;
    const double b = w.norm();
    if (b <= tol) {
      L.breakdown_at = j + 1;
      steps = j + 1;
      break;
    }
    L.offdiag[j] = b;
    L.V.col(j + 1) = w / b;
  }
  if (steps < k) {
    L.V.conservativeResize(Eigen::NoChange, steps);
    L.diag.conservativeResize(steps);
    L.offdiag.conservativeResize(std::max<Index>(steps - 1, 0));
  }
  L.k = steps;
  return L;
}

double orthogonality_defect(const DenseMatrix& Q) {
  const DenseMatrix G = Q.transpose() * Q;
  return (DenseMatrix::Identity(Q.cols(), Q.cols()) - G).norm();
}

Vector default_start_vector(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("start vector length must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v / v.norm();
}

RecurrenceResiduals recurrence_residuals(const SparseMatrix& A,
                                         const BidiagFactorization& F) {
  const DenseMatrix B = F.bidiagonal();
  DenseMatrix AV(A.rows(), F.k);
  DenseMatrix AtU(A.cols(), F.k);
  for (Index j = 0; j < F.k; ++j) {
    AV.col(j) = spmv(A, F.V.col(j));
    AtU.col(j) = spmv_transpose(A, F.U.col(j));
  }
  DenseMatrix left = AtU - F.V * B.transpose();
  if (F.k > 0) left.col(F.k - 1) -= F.trailing_beta() * F.v_next;
  return {(AV - F.U * B).norm(), left.norm()};
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace) {
  auto out = open_csv(path, "j,alpha,beta,u_defect,v_defect");
  for (const auto& r : trace)
    out << r.j << ',' << format_double(r.alpha) << ',' << format_double(r.beta) << ','
        << format_double(r.u_defect) << ',' << format_double(r.v_defect) << '\n';
}

}  // namespace spielm
