#include "spielm/svdsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

// Column selection helpers for assembling triplet sets.
struct TripletBuffer {
  std::vector<double> sigma;
  std::vector<double> residual;
  std::vector<Vector> left;
  std::vector<Vector> right;

  Index size() const { return static_cast<Index>(sigma.size()); }

  void push(const RitzTriplets& t, Index i) {
    sigma.push_back(t.sigma[i]);
    residual.push_back(t.residual[i]);
    left.push_back(t.left.col(i));
    right.push_back(t.right.col(i));
  }

  DenseMatrix stack(const std::vector<Vector>& cols, Index rows) const {
    DenseMatrix M(rows, size());
    for (Index j = 0; j < size(); ++j) M.col(j) = cols[j];
    return M;
  }
};

void flag_converged(RitzTriplets& t, double conv_tol) {
  const double ref = t.size() > 0 ? t.sigma[0] : 0.0;
  t.converged.assign(static_cast<std::size_t>(t.size()), false);
  for (Index i = 0; i < t.size(); ++i) t.converged[i] = t.residual[i] <= conv_tol * ref;
}

RitzTriplets sorted_triplets(const TripletBuffer& buf, Index m, Index n, double conv_tol) {
  std::vector<Index> order(static_cast<std::size_t>(buf.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return buf.sigma[a] > buf.sigma[b]; });
  RitzTriplets t;
  const Index p = buf.size();
  t.sigma.resize(p);
  t.residual.resize(p);
  t.left.resize(m, p);
  t.right.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    const Index s = order[j];
    t.sigma[j] = buf.sigma[s];
    t.residual[j] = buf.residual[s];
    t.left.col(j) = buf.left[s];
    t.right.col(j) = buf.right[s];
  }
  flag_converged(t, conv_tol);
  return t;
}

RitzTriplets swap_sides(RitzTriplets t) {
  std::swap(t.left, t.right);
  return t;
}

}  // namespace

Index RitzTriplets::num_converged() const {
  return static_cast<Index>(std::count(converged.begin(), converged.end(), true));
}

void SvdConfig::validate() const {
  if (k < 0) throw std::invalid_argument("svd: k must be >= 0");
  if (num_wanted < 0) throw std::invalid_argument("svd: num_wanted must be >= 0");
  if (k > 0 && num_wanted > k)
    throw std::invalid_argument("svd: num_wanted (" + std::to_string(num_wanted) +
                                ") exceeds k (" + std::to_string(k) + ")");
  if (!(conv_tol > 0.0)) throw std::invalid_argument("svd: conv_tol must be > 0");
  if (max_restarts < 0) throw std::invalid_argument("svd: max_restarts must be >= 0");
  if (!(trunc_eps > 0.0)) throw std::invalid_argument("svd: trunc_eps must be > 0");
}

RitzTriplets ritz_from_bidiag(const BidiagFactorization& F, double conv_tol) {
  if (F.k == 0) throw std::invalid_argument("ritz_from_bidiag: empty factorization");
  Eigen::BDCSVD<DenseMatrix> svd(F.bidiagonal(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const DenseMatrix& Ub = svd.matrixU();
  RitzTriplets t;
  t.sigma = svd.singularValues();
  t.left = F.U * Ub;
  t.right = F.V * svd.matrixV();
  t.residual = F.trailing_beta() * Ub.row(F.k - 1).transpose().cwiseAbs();
  flag_converged(t, conv_tol);
  return t;
}

RitzTriplets sparse_svd(const SparseMatrix& A, const SvdConfig& cfg, SvdTrace* trace) {
  cfg.validate();
  if (A.rows() < A.cols()) return swap_sides(sparse_svd(A.transpose(), cfg, trace));

  const Index m = A.rows();
  const Index n = A.cols();
  if (n == 0) throw std::invalid_argument("sparse_svd: empty matrix");
  const Index k = cfg.k == 0 ? n : std::min(cfg.k, n);
  const Index wanted = cfg.num_wanted == 0 ? k : std::min(cfg.num_wanted, n);
  const double tol =
      cfg.breakdown_tol >= 0.0 ? cfg.breakdown_tol : 1e-14 * A.frobenius_norm();

  TripletBuffer locked;
  TripletBuffer last;
  Vector restart;
  double sigma_ref = 0.0;

  for (Index run = 0; run <= cfg.max_restarts; ++run) {
    const Index avail = n - locked.size();
    if (avail <= 0) break;

    DenseMatrix locked_left;
    DenseMatrix locked_right;
    GolubKahanOptions opts;
    opts.breakdown_tol = tol;
    opts.record_trace = trace != nullptr && run == 0;
    Vector v1 = restart.size() == n ? restart
                                    : default_start_vector(n, cfg.seed + static_cast<std::uint64_t>(run));
    if (locked.size() > 0) {
      locked_left = locked.stack(locked.left, m);
      locked_right = locked.stack(locked.right, n);
      opts.locked_left = &locked_left;
      opts.locked_right = &locked_right;
      for (int pass = 0; pass < 2; ++pass)
        v1.noalias() -= locked_right * (locked_right.transpose() * v1);
    }
    double nv = v1.norm();
    if (nv <= 1e-8 && restart.size() == n) {
      // The Ritz combination lay in the locked span; fall back to a seeded vector.
      v1 = default_start_vector(n, cfg.seed + static_cast<std::uint64_t>(run));
      if (locked.size() > 0)
        for (int pass = 0; pass < 2; ++pass)
          v1.noalias() -= locked_right * (locked_right.transpose() * v1);
      nv = v1.norm();
    }
    if (nv <= 1e-8) break;
    v1 /= nv;

    const BidiagFactorization F = golub_kahan(A, v1, std::min(k, avail), cfg.mode, opts);
    RitzTriplets t = ritz_from_bidiag(F, cfg.conv_tol);
    sigma_ref = std::max(sigma_ref, t.sigma[0]);
    if (trace != nullptr && run == 0) trace->first_run = F.trace;

    SvdRunInfo info{F.k, F.breakdown_at, 0, t.sigma[0]};
    last = TripletBuffer{};
    // A run that finds nothing above the breakdown level has exhausted the
    // numerically nonzero part of the spectrum.
    const bool null_run = t.sigma[0] <= tol && locked.size() > 0;
    for (Index i = 0; i < t.size(); ++i) {
      if (!null_run && t.residual[i] <= cfg.conv_tol * sigma_ref) {
        locked.push(t, i);
        ++info.newly_locked;
      } else {
        last.push(t, i);
      }
    }
    if (trace != nullptr) trace->runs.push_back(info);
    if (null_run || locked.size() >= wanted) break;

    // Next start: sum of the unconverged Ritz vectors still wanted.
    restart = Vector::Zero(n);
    const Index still_wanted = wanted - locked.size();
    for (Index i = 0; i < std::min(still_wanted, last.size()); ++i) restart += last.right[i];
  }

  TripletBuffer all = locked;
  for (Index i = 0; i < last.size(); ++i) {
    all.sigma.push_back(last.sigma[i]);
    all.residual.push_back(last.residual[i]);
    all.left.push_back(last.left[i]);
    all.right.push_back(last.right[i]);
  }
  return sorted_triplets(all, m, n, cfg.conv_tol);
}

RitzTriplets naive_svd(const SparseMatrix& A, Index num_wanted, Index cap) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (std::min(m, n) > cap)
    throw std::invalid_argument("naive_svd: min dimension " + std::to_string(std::min(m, n)) +
                                " exceeds oracle cap " + std::to_string(cap));
  const bool wide = m < n;
  const DenseMatrix D = A.to_dense();
  const DenseMatrix G = wide ? DenseMatrix(D * D.transpose()) : DenseMatrix(D.transpose() * D);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(G);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("naive_svd: eigendecomposition failed");

  const Index p = G.rows();
  const Index keep = num_wanted == 0 ? p : std::min(num_wanted, p);
  RitzTriplets t;
  t.sigma.resize(keep);
  t.left.resize(m, keep);
  t.right.resize(n, keep);
  t.residual = Vector::Zero(keep);
  t.converged.assign(static_cast<std::size_t>(keep), true);
  for (Index j = 0; j < keep; ++j) {
    const Index src = p - 1 - j;  // eigenvalues ascend
    const double s = std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
    t.sigma[j] = s;
    const Vector q = eig.eigenvectors().col(src);
    const Vector other = wide ? Vector(D.transpose() * q) : Vector(D * q);
    const Vector mapped = s > 0.0 ? Vector(other / s) : Vector::Zero(wide ? n : m);
    if (wide) {
      t.left.col(j) = q;
      t.right.col(j) = mapped;
    } else {
      t.right.col(j) = q;
      t.left.col(j) = mapped;
    }
  }
  return t;
}

Vector pinv_from_triplets(const RitzTriplets& t, const Vector& y, double eps,
                          SolveReport* report) {
  if (y.size() != t.left.rows())
    throw std::invalid_argument("pinv: right-hand side has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(t.left.rows()));
  const double smax = t.size() > 0 ? t.sigma.maxCoeff() : 0.0;
  const double cut = eps * smax;
  Vector beta = Vector::Zero(t.right.rows());
  Index retained = 0;
  double smin = 0.0;
  for (Index i = 0; i < t.size(); ++i) {
    const double s = t.sigma[i];
    if (!(s > cut) || s <= 0.0) continue;
    beta.noalias() += t.right.col(i) * (t.left.col(i).dot(y) / s);
    smin = retained == 0 ? s : std::min(smin, s);
    ++retained;
  }
  if (report != nullptr) {
    report->retained = retained;
    report->sigma_max = smax;
    report->sigma_min_retained = smin;
    report->effective_condition = retained > 0 ? smax / smin : 0.0;
    report->num_triplets = t.size();
    report->num_converged = t.num_converged();
    report->all_truncated = retained == 0;
  }
  return beta;
}

SolveResult pinv_solve(const SparseMatrix& A, const Vector& y, const SvdConfig& cfg) {
  if (y.size() != A.rows())
    throw std::invalid_argument("pinv_solve: right-hand side has length " +
                                std::to_string(y.size()) + ", expected " +
                                std::to_string(A.rows()));
  SolveResult r;
  r.triplets = sparse_svd(A, cfg);
  r.beta = pinv_from_triplets(r.triplets, y, cfg.trunc_eps, &r.report);
  r.report.residual_norm = (spmv(A, r.beta) - y).norm();
  return r;
}

Vector bidiag_pinv_apply(const BidiagFactorization& F, const Vector& y) {
  if (y.size() != F.U.rows())
    throw std::invalid_argument("bidiag_pinv_apply: right-hand side length mismatch");
  const Index k = F.k;
  const Vector c = F.U.transpose() * y;
  // B z = c with B upper bidiagonal: z_j = (c_j - beta_j z_{j+1}) / alpha_j.
  Vector z(k);
  for (Index j = k - 1; j >= 0; --j) {
    if (F.alpha[j] == 0.0) throw std::domain_error("bidiag_pinv_apply: singular B_k");
    const double next = j + 1 < k ? F.beta[j] * z[j + 1] : 0.0;
    z[j] = (c[j] - next) / F.alpha[j];
  }
  return F.V * z;
}

Index count_near_duplicates(const Vector& sigma, double rel_gap,
                            const std::vector<bool>* mask, double min_sigma) {
  std::vector<double> s;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (mask != nullptr && !(*mask)[static_cast<std::size_t>(i)]) continue;
    if (sigma[i] > min_sigma) s.push_back(sigma[i]);
  }
  std::sort(s.begin(), s.end());
  Index pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[j] - s[i] >= rel_gap * s[j]) break;
      ++pairs;
    }
  return pairs;
}

void write_spectrum_csv(const std::filesystem::path& path, const RitzTriplets& t) {
  auto out = open_csv(path, "index,sigma,residual,converged");
  for (Index i = 0; i < t.size(); ++i)
    out << i + 1 << ',' << format_double(t.sigma[i]) << ',' << format_double(t.residual[i])
        << ',' << (t.converged[i] ? 1 : 0) << '\n';
}

void write_solve_report_csv(const std::filesystem::path& path, const SolveReport& r) {
  auto out = open_csv(path, "retained,residual_norm,effective_condition");
  out << r.retained << ',' << format_double(r.residual_norm) << ','
      << format_double(r.effective_condition) << '\n';
}

}  // namespace spielm
