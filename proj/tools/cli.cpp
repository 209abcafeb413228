#include "spielm/cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "spielm/benchgen.hpp"
#include "spielm/bidiag.hpp"
#include "spielm/csv.hpp"
#include "spielm/diagnostics.hpp"
#include "spielm/keyvalue.hpp"
#include "spielm/matrix_market.hpp"
#include "spielm/pielm.hpp"
#include "spielm/svdsolve.hpp"

namespace spielm {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string command;
  KeyValues config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  fs::path out_dir = ".";

  fs::path output(const fs::path& p) {
    outputs.push_back(p.string());
    return p;
  }
};

// Typed access to the merged configuration map.
class Settings {
 public:
  explicit Settings(const KeyValues& kv) : kv_(kv) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0 && !kv_.at(key).empty(); }

  std::string str(const std::string& key) const {
    if (!has(key)) throw UsageError("missing required setting '" + key + "'");
    return kv_.at(key);
  }

  double real(const std::string& key) const {
    const std::string s = str(key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("setting '" + key + "' is not a number: '" + s + "'");
    return v;
  }

  long long integer(const std::string& key) const {
    const std::string s = str(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("setting '" + key + "' is not an integer: '" + s + "'");
    return v;
  }

  Index count(const std::string& key, long long min_value = 0) const {
    const long long v = integer(key);
    if (v < min_value)
      throw UsageError("setting '" + key + "' must be >= " + std::to_string(min_value));
    return static_cast<Index>(v);
  }

  bool flag(const std::string& key) const {
    const std::string s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError("setting '" + key + "' is not a boolean: '" + s + "'");
  }

 private:
  const KeyValues& kv_;
};

template <class Parse>
auto as_usage(Parse&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_manifest(const Run& run, double seconds, const std::optional<std::string>& error) {
  nlohmann::ordered_json j;
  j["command"] = run.command;
  j["config"] = nlohmann::json(run.config);
  j["inputs"] = run.inputs;
  j["outputs"] = run.outputs;
  j["wall_time_s"] = seconds;
  j["seed"] = run.config.count("seed") ? std::stoull(run.config.at("seed")) : 0ULL;
  if (error) j["error"] = *error;
  else j["error"] = nullptr;
  fs::create_directories(run.out_dir);
  std::ofstream out(run.out_dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in '" + run.out_dir.string() + "'");
  out << j.dump(2) << '\n';
}

void check_keys(const KeyValues& kv, const KeyValues& defaults, const std::string& command) {
  for (const auto& [k, v] : kv)
    if (!defaults.count(k)) throw UsageError("unknown setting '" + k + "' for " + command);
}

// ---- commands --------------------------------------------------------------

KeyValues gen_defaults() {
  return {{"kind", ""},    {"m", ""},       {"n", ""},      {"rank", ""},
          {"eps", "0.001"}, {"rho", "0.01"}, {"density", ""}, {"seed", "1"},
          {"output", ""}};
}

void cmd_gen(Run& run, std::ostream& out) {
  const Settings s(run.config);
  const std::string kind = s.str("kind");
  const Index m = s.count("m", 1);
  const Index n = s.count("n", 1);
  const auto seed = static_cast<std::uint64_t>(s.integer("seed"));
  const fs::path path = s.str("output");

  SparseMatrix A;
  KeyValues sidecar;
  if (kind == "hard") {
    HardMatrixSpec spec{m, n, s.count("rank", 1), s.real("rho"), s.real("eps"), seed};
    as_usage([&] { spec.validate(); return 0; });
    A = gen_hard(spec);
    sidecar = to_key_values(spec);
  } else if (kind == "random") {
    const double density = s.real("density");
    A = as_usage([&] { return gen_random_sparse(m, n, density, seed); });
    sidecar = {{"kind", "random"},
               {"m", std::to_string(m)},
               {"n", std::to_string(n)},
               {"density", format_double(density)},
               {"seed", std::to_string(seed)}};
  } else {
    throw UsageError("--kind must be hard or random, got '" + kind + "'");
  }
  write_matrix_market(run.output(path), A);
  fs::path params = path;
  params += ".params";
  write_key_values(run.output(params), sidecar);
  out << "wrote " << path.string() << " (" << A.rows() << " x " << A.cols() << ", nnz "
      << A.nnz() << ")\n";
}

KeyValues svd_defaults() {
  return {{"input", ""},        {"k", "0"},         {"num_wanted", "0"}, {"ortho", "full"},
          {"restarts", "20"},   {"conv_tol", "1e-10"}, {"output", ""},  {"trace", ""},
          {"seed", "1"}};
}

void cmd_svd(Run& run, std::ostream& out) {
  const Settings s(run.config);
  const fs::path input = s.str("input");
  run.inputs.push_back(input.string());
  SvdConfig cfg;
  cfg.k = s.count("k");
  cfg.num_wanted = s.count("num_wanted");
  cfg.mode = as_usage([&] { return parse_ortho_mode(s.str("ortho")); });
  cfg.max_restarts = s.count("restarts");
  cfg.conv_tol = s.real("conv_tol");
  cfg.seed = static_cast<std::uint64_t>(s.integer("seed"));
  as_usage([&] { cfg.validate(); return 0; });

  const SparseMatrix A = read_matrix_market(input);
  if (cfg.k > 0) cfg.k = std::min(cfg.k, std::min(A.rows(), A.cols()));
  if (cfg.num_wanted > 0 && cfg.k > 0) cfg.num_wanted = std::min(cfg.num_wanted, cfg.k);
  SvdTrace trace;
  const bool want_trace = s.has("trace");
  const RitzTriplets t = sparse_svd(A, cfg, want_trace ? &trace : nullptr);

  const fs::path spectrum = s.has("output") ? fs::path(s.str("output")) : run.out_dir / "spectrum.csv";
  write_spectrum_csv(run.output(spectrum), t);
  if (want_trace) write_trace_csv(run.output(s.str("trace")), trace.first_run);
  out << "triplets " << t.size() << ", converged " << t.num_converged() << ", sigma_max "
      << (t.size() ? format_double(t.sigma[0]) : std::string("n/a")) << '\n';
}

KeyValues diagnose_defaults() {
  return {{"input", ""}, {"rank_tol", "1e-12"}, {"dense_cap", "2000"}, {"k", "0"},
          {"spectrum", "true"}, {"output", ""}, {"seed", "1"}};
}

void cmd_diagnose(Run& run, std::ostream& out) {
  const Settings s(run.config);
  const fs::path input = s.str("input");
  run.inputs.push_back(input.string());
  DiagnoseOptions opts;
  opts.rank_tol = s.real("rank_tol");
  opts.dense_cap = s.count("dense_cap");
  opts.krylov.k = s.count("k");
  opts.krylov.seed = static_cast<std::uint64_t>(s.integer("seed"));
  opts.compute_spectrum = s.flag("spectrum");
  if (!(opts.rank_tol > 0.0)) throw UsageError("--rank-tol must be > 0");

  const SparseMatrix A = read_matrix_market(input);
  const MatrixDiagnostics d = diagnose(A, opts);
  const fs::path path = s.has("output") ? fs::path(s.str("output")) : run.out_dir / "diagnostics.csv";
  write_diagnostics_csv(run.output(path), d);
  out << A.rows() << " x " << A.cols() << ", nnz " << d.nnz << ", density "
      << format_double(d.density);
  if (d.spectrum_method != "none")
    out << ", rank " << d.numerical_rank << ", cond " << format_double(d.condition_number);
  out << '\n';
}

KeyValues pde_defaults() {
  return {{"pe", ""},
          {"L", "1"},
          {"phi0", "0"},
          {"phiL", "1"},
          {"nodes", "2000"},
          {"collocations", "2000"},
          {"width", "1e-6"},
          {"encoding", "gaussian"},
          {"weight_range", "1"},
          {"bias_range", "0"},
          {"drop_tol", "1e-14"},
          {"row_scaling", "unit-norm"},
          {"shuffle", "false"},
          {"grid", "10000"},
          {"dump_system", "false"},
          {"seed", "1"},
          {"svd.k", "0"},
          {"svd.trunc_eps", "1e-12"},
          {"svd.mode", "full"},
          {"svd.max_restarts", "20"},
          {"svd.conv_tol", "1e-10"}};
}

void cmd_solve_pde(Run& run, std::ostream& out) {
  const Settings s(run.config);
  const auto seed = static_cast<std::uint64_t>(s.integer("seed"));
  const double length = s.real("L");
  if (!(length > 0.0)) throw UsageError("L must be > 0");

  RfnnConfig mc;
  mc.nodes = s.count("nodes", 2);
  mc.width = s.real("width");
  mc.encoding = as_usage([&] { return parse_encoding(s.str("encoding")); });
  mc.weight_range = s.real("weight_range");
  mc.bias_range = s.real("bias_range");
  mc.seed = seed;
  const RfnnModel model = as_usage([&] { return make_model(mc); });

  ConvDiffProblem prob = make_problem(s.real("pe"), length, s.count("collocations", 1),
                                      s.flag("shuffle"), seed);
  prob.phi0 = s.real("phi0");
  prob.phiL = s.real("phiL");

  SvdConfig cfg;
  cfg.k = s.count("svd.k");
  cfg.trunc_eps = s.real("svd.trunc_eps");
  cfg.mode = as_usage([&] { return parse_ortho_mode(s.str("svd.mode")); });
  cfg.max_restarts = s.count("svd.max_restarts");
  cfg.conv_tol = s.real("svd.conv_tol");
  cfg.seed = seed;
  as_usage([&] { cfg.validate(); return 0; });
  const double drop_tol = s.real("drop_tol");
  if (!(drop_tol >= 0.0)) throw UsageError("drop_tol must be >= 0");
  const RowScaling scaling = as_usage([&] { return parse_row_scaling(s.str("row_scaling")); });
  const Index grid_points = s.count("grid", 2);

  if (s.flag("dump_system"))
    write_matrix_market(run.output(run.out_dir / "system.mtx"),
                        assemble(model, prob, drop_tol, scaling).H);

  const TrainResult trained = train(model, prob, cfg, drop_tol, scaling);
  const std::vector<double> grid = uniform_grid(length, grid_points);
  const ErrorMetrics m = error_metrics(trained.model, prob, grid);

  write_solution_csv(run.output(run.out_dir / "solution.csv"), trained.model, prob, grid);
  write_metrics_csv(run.output(run.out_dir / "metrics.csv"), m);
  write_diagnostics_csv(run.output(run.out_dir / "diagnostics.csv"), trained.report.diagnostics);
  write_solve_report_csv(run.output(run.out_dir / "solve_report.csv"), trained.report.solve);

  const auto& d = trained.report.diagnostics;
  out << "system " << d.nrows << " x " << d.ncols << ", density " << format_double(d.density)
      << ", rank " << d.numerical_rank << ", retained " << trained.report.solve.retained << '\n'
      << "rel_linf " << format_double(m.rel_linf) << ", l2_rel " << format_double(m.l2_rel)
      << ", boundary_err " << format_double(m.boundary_err) << '\n';
}

struct Command {
  std::string name;
  std::function<KeyValues()> defaults;
  std::function<void(Run&, std::ostream&)> body;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse SVD and random-feature PDE toolkit", "spielm"};
  app.require_subcommand(1);

  KeyValues overlay;
  std::string out_dir = ".";
  std::string config_path;
  std::string manifest_path;

  auto set = [&overlay](const std::string& key) {
    return [&overlay, key](const std::string& v) { overlay[key] = v; };
  };
  auto on = [&overlay](const std::string& key) {
    return [&overlay, key](std::int64_t) { overlay[key] = "true"; };
  };

  app.add_option_function<std::string>("--seed", set("seed"), "Random seed (default 1)");
  app.add_option("--out-dir", out_dir, "Directory for outputs and manifest.json");
  app.add_option("--config", config_path, "key=value settings file");
  app.add_option("--from-manifest", manifest_path, "Reuse the config map of a manifest.json");

  auto* gen = app.add_subcommand("gen", "Generate a test matrix (Matrix Market)");
  gen->add_option_function<std::string>("--kind", set("kind"), "hard | random");
  gen->add_option_function<std::string>("--m", set("m"), "Rows");
  gen->add_option_function<std::string>("--n", set("n"), "Columns");
  gen->add_option_function<std::string>("--rank", set("rank"), "Low-rank dimension (hard)");
  gen->add_option_function<std::string>("--eps", set("eps"), "Noise amplitude (hard)");
  gen->add_option_function<std::string>("--rho", set("rho"), "Noise density (hard)");
  gen->add_option_function<std::string>("--density", set("density"), "Fill fraction (random)");
  gen->add_option_function<std::string>("-o,--output", set("output"), "Output .mtx path");

  auto* svd = app.add_subcommand("svd", "Krylov SVD spectrum of a Matrix Market file");
  svd->add_option_function<std::string>("-i,--input", set("input"), "Input .mtx");
  svd->add_option_function<std::string>("--k", set("k"), "Subspace size (0 = min dim)");
  svd->add_option_function<std::string>("--num-wanted", set("num_wanted"), "Triplets wanted");
  svd->add_option_function<std::string>("--ortho", set("ortho"), "none | full | one-sided");
  svd->add_option_function<std::string>("--restarts", set("restarts"), "Maximum restarts");
  svd->add_option_function<std::string>("--conv-tol", set("conv_tol"), "Relative tolerance");
  svd->add_option_function<std::string>("-o,--output", set("output"), "Spectrum CSV path");
  svd->add_option_function<std::string>("--trace", set("trace"), "Iteration trace CSV path");

  auto* diag = app.add_subcommand("diagnose", "Rank, condition and density of a matrix");
  diag->add_option_function<std::string>("-i,--input", set("input"), "Input .mtx");
  diag->add_option_function<std::string>("--rank-tol", set("rank_tol"), "Relative rank cutoff");
  diag->add_option_function<std::string>("--dense-cap", set("dense_cap"), "Dense SVD size cap");
  diag->add_option_function<std::string>("--k", set("k"), "Krylov subspace size above the cap");
  diag->add_flag_function("--no-spectrum", [&overlay](std::int64_t) { overlay["spectrum"] = "false"; },
                          "Structural fields only");
  diag->add_option_function<std::string>("-o,--output", set("output"), "Diagnostics CSV path");

  auto* pde = app.add_subcommand("solve-pde", "Train the random-feature model on the PDE");
  pde->add_option_function<std::string>("--pe", set("pe"), "Peclet number u/D");
  pde->add_option_function<std::string>("--length", set("L"), "Domain length");
  pde->add_option_function<std::string>("--phi0", set("phi0"), "Value at x = 0");
  pde->add_option_function<std::string>("--phiL", set("phiL"), "Value at x = length");
  pde->add_option_function<std::string>("--nodes", set("nodes"), "Hidden units (L + 1)");
  pde->add_option_function<std::string>("--collocations", set("collocations"), "Interior points");
  pde->add_option_function<std::string>("--width", set("width"), "Gaussian kernel width d");
  pde->add_flag_function("--no-encoding", [&overlay](std::int64_t) { overlay["encoding"] = "none"; },
                         "Disable the Gaussian encoding");
  pde->add_option_function<std::string>("--weight-range", set("weight_range"), "W ~ U[-r, r]");
  pde->add_option_function<std::string>("--bias-range", set("bias_range"), "b ~ U[-r, r]");
  pde->add_option_function<std::string>("--drop-tol", set("drop_tol"), "Sparsification cutoff");
  pde->add_option_function<std::string>("--row-scaling", set("row_scaling"), "none | unit-norm");
  pde->add_flag_function("--shuffle", on("shuffle"), "Shuffle collocation order");
  pde->add_option_function<std::string>("--grid", set("grid"), "Evaluation grid points");
  pde->add_flag_function("--dump-system", on("dump_system"), "Write H as system.mtx");
  pde->add_option_function<std::string>("--svd-k", set("svd.k"), "Subspace size (0 = min dim)");
  pde->add_option_function<std::string>("--trunc-eps", set("svd.trunc_eps"), "Relative cutoff");
  pde->add_option_function<std::string>("--ortho", set("svd.mode"), "none | full | one-sided");
  pde->add_option_function<std::string>("--restarts", set("svd.max_restarts"), "Maximum restarts");
  pde->add_option_function<std::string>("--conv-tol", set("svd.conv_tol"), "Relative tolerance");

  const std::vector<Command> commands = {
      {"gen", gen_defaults, cmd_gen},
      {"svd", svd_defaults, cmd_svd},
      {"diagnose", diagnose_defaults, cmd_diagnose},
      {"solve-pde", pde_defaults, cmd_solve_pde},
  };

  std::vector<std::string> argv_store{"spielm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands)
    if (app.got_subcommand(c.name)) cmd = &c;

  Run run;
  run.command = cmd->name;
  run.out_dir = out_dir;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  int code = kExitOk;
  std::optional<std::string> error;
  try {
    const KeyValues defaults = cmd->defaults();
    KeyValues merged = defaults;
    if (!config_path.empty()) {
      run.inputs.push_back(config_path);
      const KeyValues file = read_key_values(config_path);
      check_keys(file, defaults, cmd->name);
      for (const auto& [k, v] : file) merged[k] = v;
    }
    if (!manifest_path.empty()) {
      run.inputs.push_back(manifest_path);
      std::ifstream in(manifest_path);
      if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
      const auto j = nlohmann::json::parse(in);
      if (j.value("command", std::string()) != cmd->name)
        throw UsageError("manifest was written by a different command");
      const KeyValues file = j.at("config").get<KeyValues>();
      check_keys(file, defaults, cmd->name);
      for (const auto& [k, v] : file) merged[k] = v;
    }
    for (const auto& [k, v] : overlay) merged[k] = v;
    run.config = merged;
    cmd->body(run, out);
  } catch (const UsageError& e) {
    error = e.what();
    code = kExitUsage;
  } catch (const std::exception& e) {
    error = e.what();
    code = kExitFailure;
  }
  if (error) err << "error: " << *error << '\n';

  try {
    write_manifest(run, elapsed(), error);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (code == kExitOk) code = kExitFailure;
  }
  return code;
}

}  // namespace spielm
