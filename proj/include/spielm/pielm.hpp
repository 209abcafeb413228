#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "spielm/diagnostics.hpp"
#include "spielm/sparse_matrix.hpp"
#include "spielm/svdsolve.hpp"

namespace spielm {

enum class Encoding { gaussian, none };
enum class Activation { tanh };
/// unit_norm divides every row of H (and its right side) by the row's 2-norm.
enum class RowScaling { none, unit_norm };

Encoding parse_encoding(std::string_view name);
RowScaling parse_row_scaling(std::string_view name);
std::string_view to_string(Encoding e);
std::string_view to_string(RowScaling s);

struct RfnnConfig {
  Index nodes = 1001;  // L + 1 hidden units
  double width = 1e-5;  // d in exp(-(x - mu)^2 / d)
  Encoding encoding = Encoding::gaussian;
  double weight_range = 1.0;  // W ~ U[-weight_range, weight_range]
  double bias_range = 0.0;    // b ~ U[-bias_range, bias_range]; 0 gives b = 0
  std::uint64_t seed = kDefaultSeed;
};

struct RfnnModel {
  Vector W;
  Vector b;
  Vector mu;  // mu_i = i / L
  double width = 1e-5;
  Encoding encoding = Encoding::gaussian;
  Activation activation = Activation::tanh;
  double drop_tol = 1e-14;
  std::optional<Vector> beta;

  Index features() const { return W.size(); }
  bool trained() const { return beta.has_value(); }
};

/// Throws std::invalid_argument for nodes < 2, width <= 0 or negative ranges.
RfnnModel make_model(const RfnnConfig& cfg);

/// u phi' = D phi'' on (0, length) with phi(0) = phi0, phi(length) = phiL.
struct ConvDiffProblem {
  double length = 1.0;
  double phi0 = 0.0;
  double phiL = 1.0;
  double velocity = 0.0;
  double diffusivity = 1.0;
  std::vector<double> collocation;

  double peclet() const { return velocity / diffusivity; }
};

/// Collocation x_j = length * j / (count + 1), j = 1..count; optionally
/// shuffled with a seeded permutation.
std::vector<double> uniform_collocation(double length, Index count, bool shuffle = false,
                                        std::uint64_t seed = kDefaultSeed);

ConvDiffProblem make_problem(double pe, double length, Index collocations,
                             bool shuffle = false, std::uint64_t seed = kDefaultSeed);

/// exp(-(x - mu)^2 / d)
double gaussian_encoding(double x, double mu, double d);

struct SparseRow {
  std::vector<Index> index;
  std::vector<double> value;
};

/// Row of phi(z_i(x)) (order 0) or its first or second x-derivative, with
/// z_i(x) = W_i x E(x, mu_i) + b_i. Order 0 drops entries with
/// |phi(z_i) - phi(b_i)| <= drop_tol, orders 1 and 2 drop |value| <= drop_tol.
/// Throws std::invalid_argument for order outside {0, 1, 2}.
SparseRow feature_row(const RfnnModel& model, double x, int order, double drop_tol);
Vector dense_feature_row(const RfnnModel& model, double x, int order);

enum class RowKind { pde, boundary };

struct AssembledSystem {
  SparseMatrix H;  // (N_f + 2) x (L + 1): PDE rows, then x = 0, then x = length
  Vector T;
  std::vector<RowKind> row_kind;
  Vector row_scale;  // factor applied to each row (1 when unscaled)
};

/// Throws std::invalid_argument when the collocation set is empty or a point
/// lies outside (0, length).
AssembledSystem assemble(const RfnnModel& model, const ConvDiffProblem& prob,
                         double drop_tol, RowScaling scaling = RowScaling::unit_norm);

/// Order-0 rows at the given points.
SparseMatrix activation_matrix(const RfnnModel& model, const std::vector<double>& xs,
                               double drop_tol);

struct TrainReport {
  SolveReport solve;
  double unscaled_residual = 0.0;  // ||H beta - T|| before row scaling
  MatrixDiagnostics diagnostics;   // of the scaled H, from the Ritz spectrum
  Index system_rows = 0;
  Index system_cols = 0;
};

struct TrainResult {
  RfnnModel model;
  TrainReport report;
};

/// Assembles H beta = T, solves it with pinv_solve and stores beta.
/// Throws std::logic_error if the model is already trained.
TrainResult train(const RfnnModel& model, const ConvDiffProblem& prob, const SvdConfig& cfg,
                  double drop_tol, RowScaling scaling = RowScaling::unit_norm,
                  double rank_tol = 1e-12);

/// Throws std::logic_error if the model is untrained.
std::vector<double> predict(const RfnnModel& model, const std::vector<double>& xs);

/// Closed form; endpoints are reproduced exactly for every finite Pe.
double exact_solution(const ConvDiffProblem& prob, double x);

struct ErrorMetrics {
  double l2_rel = 0.0;
  double linf = 0.0;
  double rel_linf = 0.0;  // linf / max |exact|
  double boundary_err = 0.0;
};

ErrorMetrics error_metrics(const RfnnModel& model, const ConvDiffProblem& prob,
                           const std::vector<double>& grid);

/// count points spanning [0, length] including both ends.
std::vector<double> uniform_grid(double length, Index count);

/// `x,predicted,exact,abs_error`
void write_solution_csv(const std::filesystem::path& path, const RfnnModel& model,
                        const ConvDiffProblem& prob, const std::vector<double>& grid);
/// `metric,value`
void write_metrics_csv(const std::filesystem::path& path, const ErrorMetrics& m);

}  // namespace spielm
