#include "spielm/pielm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

// exp(-745 s^2 / d) underflows to zero in double precision beyond this radius.
constexpr double kUnderflowExponent = 745.0;

struct PreActivation {
  double z = 0.0;
  double dz = 0.0;
  double d2z = 0.0;
};

PreActivation pre_activation(const RfnnModel& m, Index i, double x) {
  const double w = m.W[i];
  if (m.encoding == Encoding::none) return {w * x + m.b[i], w, 0.0};
  const double s = x - m.mu[i];
  const double inv_d = 1.0 / m.width;
  const double E = std::exp(-s * s * inv_d);
  const double dE = -2.0 * s * inv_d * E;
  const double d2E = (4.0 * s * s * inv_d * inv_d - 2.0 * inv_d) * E;
  return {w * x * E + m.b[i], w * (E + x * dE), w * (2.0 * dE + x * d2E)};
}

// Index range [lo, hi] of units whose kernel can be nonzero at x.
std::pair<Index, Index> window(const RfnnModel& m, double x) {
  const Index last = m.features() - 1;
  if (m.encoding == Encoding::none) return {0, last};
  const double r = std::sqrt(kUnderflowExponent * m.width);
  const double L = static_cast<double>(last);
  const double lo = std::floor((x - r) * L) - 1.0;
  const double hi = std::ceil((x + r) * L) + 1.0;
  return {static_cast<Index>(std::clamp(lo, 0.0, L)), static_cast<Index>(std::clamp(hi, 0.0, L))};
}

struct TanhDerivs {
  double t, p1, p2;
};

TanhDerivs activation(double z) {
  const double t = std::tanh(z);
  const double p1 = 1.0 - t * t;
  return {t, p1, -2.0 * t * p1};
}

void check_model(const RfnnModel& m) {
  if (m.features() < 2 || m.b.size() != m.features() || m.mu.size() != m.features())
    throw std::invalid_argument("model: W, b and mu must share a length >= 2");
  if (!(m.width > 0.0)) throw std::invalid_argument("model: width must be > 0");
}

}  // namespace

Encoding parse_encoding(std::string_view name) {
  if (name == "gaussian") return Encoding::gaussian;
  if (name == "none") return Encoding::none;
  throw std::invalid_argument("unknown encoding '" + std::string(name) + "'");
}

RowScaling parse_row_scaling(std::string_view name) {
  if (name == "none") return RowScaling::none;
  if (name == "unit_norm" || name == "unit-norm") return RowScaling::unit_norm;
  throw std::invalid_argument("unknown row scaling '" + std::string(name) +
                              "' (expected none or unit-norm)");
}

std::string_view to_string(Encoding e) { return e == Encoding::gaussian ? "gaussian" : "none"; }
std::string_view to_string(RowScaling s) { return s == RowScaling::none ? "none" : "unit-norm"; }

RfnnModel make_model(const RfnnConfig& cfg) {
  if (cfg.nodes < 2) throw std::invalid_argument("model: nodes must be >= 2");
  if (!(cfg.width > 0.0)) throw std::invalid_argument("model: width must be > 0");
  if (!(cfg.weight_range >= 0.0) || !(cfg.bias_range >= 0.0))
    throw std::invalid_argument("model: weight and bias ranges must be >= 0");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RfnnModel m;
  m.width = cfg.width;
  m.encoding = cfg.encoding;
  m.W.resize(cfg.nodes);
  m.b = Vector::Zero(cfg.nodes);
  m.mu.resize(cfg.nodes);
  const double L = static_cast<double>(cfg.nodes - 1);
  for (Index i = 0; i < cfg.nodes; ++i) {
    m.W[i] = cfg.weight_range * unit(rng);
    m.mu[i] = static_cast<double>(i) / L;
  }
  if (cfg.bias_range > 0.0)
    for (Index i = 0; i < cfg.nodes; ++i) m.b[i] = cfg.bias_range * unit(rng);
  return m;
}

std::vector<double> uniform_collocation(double length, Index count, bool shuffle,
                                        std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("collocation count must be >= 0");
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j)
    xs[j] = length * static_cast<double>(j + 1) / static_cast<double>(count + 1);
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(xs.begin(), xs.end(), rng);
  }
  return xs;
}

ConvDiffProblem make_problem(double pe, double length, Index collocations, bool shuffle,
                             std::uint64_t seed) {
  ConvDiffProblem p;
  p.length = length;
  p.velocity = pe;
  p.diffusivity = 1.0;
  p.collocation = uniform_collocation(length, collocations, shuffle, seed);
  return p;
}

double gaussian_encoding(double x, double mu, double d) {
  const double s = x - mu;
  return std::exp(-s * s / d);
}

SparseRow feature_row(const RfnnModel& model, double x, int order, double drop_tol) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("feature_row: order must be 0, 1 or 2");
  check_model(model);
  SparseRow row;
  const auto [lo, hi] = window(model, x);
  for (Index i = lo; i <= hi; ++i) {
    const PreActivation p = pre_activation(model, i, x);
    const TanhDerivs a = activation(p.z);
    double v = 0.0;
    bool keep = false;
    switch (order) {
      case 0:
        v = a.t;
        keep = std::abs(a.t - std::tanh(model.b[i])) > drop_tol;
        break;
      case 1:
        v = a.p1 * p.dz;
        keep = std::abs(v) > drop_tol;
        break;
      default:
        v = a.p2 * p.dz * p.dz + a.p1 * p.d2z;
        keep = std::abs(v) > drop_tol;
        break;
    }
    if (keep) {
      row.index.push_back(i);
      row.value.push_back(v);
    }
  }
  return row;
}

Vector dense_feature_row(const RfnnModel& model, double x, int order) {
  const SparseRow r = feature_row(model, x, order, 0.0);
  Vector out = Vector::Zero(model.features());
  for (std::size_t p = 0; p < r.index.size(); ++p) out[r.index[p]] = r.value[p];
  return out;
}

AssembledSystem assemble(const RfnnModel& model, const ConvDiffProblem& prob, double drop_tol,
                         RowScaling scaling) {
  check_model(model);
  if (prob.collocation.empty()) throw std::invalid_argument("assemble: empty collocation set");
  if (!(drop_tol >= 0.0)) throw std::invalid_argument("assemble: drop_tol must be >= 0");
  for (double x : prob.collocation)
    if (!(x > 0.0 && x < prob.length))
      throw std::invalid_argument("assemble: collocation point " + format_double(x) +
                                  " outside the open domain");

  const auto nf = static_cast<Index>(prob.collocation.size());
  const Index rows = nf + 2;
  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;

  AssembledSystem sys;
  sys.T = Vector::Zero(rows);
  sys.row_scale = Vector::Ones(rows);
  sys.row_kind.assign(static_cast<std::size_t>(nf), RowKind::pde);
  sys.row_kind.push_back(RowKind::boundary);
  sys.row_kind.push_back(RowKind::boundary);

  const double u = prob.velocity;
  const double D = prob.diffusivity;
  for (Index r = 0; r < nf; ++r) {
    const double x = prob.collocation[r];
    const auto [lo, hi] = window(model, x);
    for (Index i = lo; i <= hi; ++i) {
      const PreActivation p = pre_activation(model, i, x);
      const TanhDerivs a = activation(p.z);
      const double d1 = a.p1 * p.dz;
      const double d2 = a.p2 * p.dz * p.dz + a.p1 * p.d2z;
      const double v = u * d1 - D * d2;
      if (std::abs(v) > drop_tol) {
        cols.push_back(i);
        vals.push_back(v);
      }
    }
    offsets[r + 1] = static_cast<Index>(vals.size());
  }
  const double ends[2] = {0.0, prob.length};
  for (int e = 0; e < 2; ++e) {
    const SparseRow row = feature_row(model, ends[e], 0, drop_tol);
    cols.insert(cols.end(), row.index.begin(), row.index.end());
    vals.insert(vals.end(), row.value.begin(), row.value.end());
    offsets[nf + e + 1] = static_cast<Index>(vals.size());
  }
  sys.T[nf] = prob.phi0;
  sys.T[nf + 1] = prob.phiL;

  if (scaling == RowScaling::unit_norm) {
    for (Index r = 0; r < rows; ++r) {
      double s2 = 0.0;
      for (Index p = offsets[r]; p < offsets[r + 1]; ++p) s2 += vals[p] * vals[p];
      if (s2 == 0.0) continue;
      const double scale = 1.0 / std::sqrt(s2);
      for (Index p = offsets[r]; p < offsets[r + 1]; ++p) vals[p] *= scale;
      sys.T[r] *= scale;
      sys.row_scale[r] = scale;
    }
  }
  sys.H = SparseMatrix(rows, model.features(), std::move(offsets), std::move(cols),
                       std::move(vals));
  return sys;
}

SparseMatrix activation_matrix(const RfnnModel& model, const std::vector<double>& xs,
                               double drop_tol) {
  std::vector<Index> offsets(xs.size() + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const SparseRow row = feature_row(model, xs[r], 0, drop_tol);
    cols.insert(cols.end(), row.index.begin(), row.index.end());
    vals.insert(vals.end(), row.value.begin(), row.value.end());
    offsets[r + 1] = static_cast<Index>(vals.size());
  }
  return SparseMatrix(static_cast<Index>(xs.size()), model.features(), std::move(offsets),
                      std::move(cols), std::move(vals));
}

TrainResult train(const RfnnModel& model, const ConvDiffProblem& prob, const SvdConfig& cfg,
                  double drop_tol, RowScaling scaling, double rank_tol) {
  if (model.trained()) throw std::logic_error("train: model is already trained");
  const AssembledSystem sys = assemble(model, prob, drop_tol, scaling);
  SolveResult solved = pinv_solve(sys.H, sys.T, cfg);

  TrainResult out;
  out.model = model;
  out.model.drop_tol = drop_tol;
  out.model.beta = solved.beta;
  out.report.solve = solved.report;
  out.report.system_rows = sys.H.rows();
  out.report.system_cols = sys.H.cols();
  const Vector r = spmv(sys.H, solved.beta) - sys.T;
  out.report.unscaled_residual = r.cwiseQuotient(sys.row_scale).norm();
  out.report.diagnostics =
      diagnostics_from_spectrum(sys.H, solved.triplets.sigma, rank_tol, "krylov");
  return out;
}

std::vector<double> predict(const RfnnModel& model, const std::vector<double>& xs) {
  if (!model.trained()) throw std::logic_error("predict: model is not trained");
  const Vector& beta = *model.beta;
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const SparseRow row = feature_row(model, x, 0, model.drop_tol);
    double s = 0.0;
    for (std::size_t p = 0; p < row.index.size(); ++p) s += row.value[p] * beta[row.index[p]];
    out.push_back(s);
  }
  return out;
}

double exact_solution(const ConvDiffProblem& prob, double x) {
  const double a = prob.peclet();
  const double L = prob.length;
  const double aL = a * L;
  // Blend as (1 - r) phi0 + r phiL so r = 0 and r = 1 reproduce the endpoints exactly.
  double r = 0.0;
  if (aL == 0.0) {
    r = x / L;
  } else if (aL > 30.0) {
    // Factor e^{aL} out of numerator and denominator so nothing overflows.
    const double tail = std::exp(-aL);
    r = (std::exp(a * (x - L)) - tail) / (1.0 - tail);
  } else {
    r = std::expm1(a * x) / std::expm1(aL);
  }
  return (1.0 - r) * prob.phi0 + r * prob.phiL;
}

ErrorMetrics error_metrics(const RfnnModel& model, const ConvDiffProblem& prob,
                           const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("error_metrics: empty grid");
  const std::vector<double> pred = predict(model, grid);
  double err2 = 0.0, ref2 = 0.0, linf = 0.0, refinf = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ex = exact_solution(prob, grid[i]);
    const double e = std::abs(pred[i] - ex);
    err2 += e * e;
    ref2 += ex * ex;
    linf = std::max(linf, e);
    refinf = std::max(refinf, std::abs(ex));
  }
  const std::vector<double> ends = predict(model, {0.0, prob.length});
  ErrorMetrics m;
  m.l2_rel = ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
  m.linf = linf;
  m.rel_linf = refinf > 0.0 ? linf / refinf : linf;
  m.boundary_err = std::max(std::abs(ends[0] - prob.phi0), std::abs(ends[1] - prob.phiL));
  return m;
}

std::vector<double> uniform_grid(double length, Index count) {
  if (count < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i)
    g[i] = length * static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = length;
  return g;
}

void write_solution_csv(const std::filesystem::path& path, const RfnnModel& model,
                        const ConvDiffProblem& prob, const std::vector<double>& grid) {
  const std::vector<double> pred = predict(model, grid);
  auto out = open_csv(path, "x,predicted,exact,abs_error");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ex = exact_solution(prob, grid[i]);
    out << format_double(grid[i]) << ',' << format_double(pred[i]) << ',' << format_double(ex)
        << ',' << format_double(std::abs(pred[i] - ex)) << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, const ErrorMetrics& m) {
  auto out = open_csv(path, "metric,value");
  out << "l2_rel," << format_double(m.l2_rel) << '\n'
      << "linf," << format_double(m.linf) << '\n'
      << "rel_linf," << format_double(m.rel_linf) << '\n'
      << "boundary_err," << format_double(m.boundary_err) << '\n';
}

}  // namespace spielm
