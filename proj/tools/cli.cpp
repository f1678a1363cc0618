#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fastalm/cluster.hpp"
#include "fastalm/error.hpp"
#include "fastalm/matrix_market.hpp"
#include "fastalm/metrics.hpp"

namespace fastalm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Options that may also come from the JSON config file. A key present in the
// file is applied only when its flag was not given on the command line.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + flag_name(key), target, help);
    entries_[key] = {opt, [&target, key](const json& j) {
                       try {
                         target = j.get<T>();
                       } catch (const json::exception&) {
                         throw ParameterError("config key '" + key + "' has the wrong type");
                       }
                     }};
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& target, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + flag_name(key), target, help);
    entries_[key] = {opt, [&target, key](const json& j) {
                       if (!j.is_boolean()) throw ParameterError("config key '" + key + "' must be a boolean");
                       target = j.get<bool>();
                     }};
    return opt;
  }

  void add_config_option() { app_->add_option("--config", config_path_, "JSON config file; flags override it"); }

  void apply_config() const {
    if (config_path_.empty()) return;
    std::ifstream is(config_path_, std::ios::binary);
    if (!is) throw IoError("cannot open config file " + config_path_);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ParameterError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
    for (const auto& item : j.items()) {
      auto it = entries_.find(item.key());
      if (it == entries_.end()) throw ParameterError("unknown config key '" + item.key() + "'");
      if (it->second.option->count() == 0) it->second.apply(item.value());
    }
  }

 private:
  static std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }

  struct Entry {
    CLI::Option* option = nullptr;
    std::function<void(const json&)> apply;
  };
  CLI::App* app_;
  std::map<std::string, Entry> entries_;
  std::string config_path_;
};

fs::path output_dir(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw IoError("cannot write " + path.string());
}

// --------------------------------------------------------------------------- gen

struct GenConfig {
  std::string kind = "lasso";
  Index m = 100;
  Index n = 300;
  double alpha = 1.0;
  std::vector<double> alphas{kDefaultThreeBlockAlphas.begin(), kDefaultThreeBlockAlphas.end()};
  double alpha1 = 0.1;
  double alpha2 = 0.01;
  SubspaceParams subspace;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int cmd_gen(const GenConfig& c, std::ostream& out) {
  ProblemManifest manifest;
  manifest.kind = parse_problem_kind(c.kind);
  manifest.seed = c.seed;
  switch (manifest.kind) {
    case ProblemKind::kLassoSimplex:
      manifest.m = c.m;
      manifest.n = c.n;
      manifest.alphas = {c.alpha};
      break;
    case ProblemKind::kThreeBlock:
      if (c.alphas.size() != 3) throw ParameterError("three_block needs exactly three alphas");
      manifest.m = c.m;
      manifest.alphas = c.alphas;
      break;
    case ProblemKind::kSubspace:
      manifest.subspace = c.subspace;
      manifest.alphas = {c.alpha1, c.alpha2};
      break;
  }
  const ProblemInstance inst = generate_instance(manifest);
  build_problem(inst);
  const fs::path path = save_instance(inst, output_dir(c.out_dir));
  out << path.string() << '\n';
  return kOk;
}

// -------------------------------------------------------------------------- race

std::vector<Algorithm> race_algorithms(const RaceConfig& c, const BlockProblem& problem) {
  std::vector<Algorithm> algs;
  for (const auto& name : c.algorithms) {
    auto a = parse_algorithm(name);
    if (!a) throw ParameterError("unknown algorithm '" + name + "'");
    algs.push_back(*a);
  }
  if (algs.empty()) {
    if (problem.size() == 1)
      algs = {Algorithm::kPalm, Algorithm::kFastPalm};
    else
      algs = {Algorithm::kPlAdmmPs, Algorithm::kFastPlAdmmPs};
  }
  return algs;
}

json trace_summary(const std::vector<TraceRecord>& trace, int iterations) {
  json s;
  if (trace.empty()) {
    s["final"] = nullptr;
    return s;
  }
  const auto& last = trace.back();
  s["final"] = {{"iter", last.iter},
                {"objective", last.objective},
                {"feas_norm", last.feas_norm},
                {"conv_fn", last.conv_fn},
                {"bound", last.bound}};
  const int lo = std::max(1, iterations / 10);
  s["slope"] = {{"k_lo", lo}, {"k_hi", iterations}, {"value", loglog_slope(trace, lo, iterations)}};
  return s;
}

int cmd_race(const RaceConfig& c, std::ostream& out) {
  if (c.manifest.empty()) throw ParameterError("race: --manifest is required");
  if (c.iterations < 0) throw ParameterError("race: iterations must be >= 0");
  const ProblemInstance inst = load_instance(c.manifest);
  const BlockProblem problem = build_problem(inst);
  const auto algs = race_algorithms(c, problem);

  SolverConfig base;
  base.max_iters = c.iterations;
  base.beta_fixed = c.beta;
  base.eta_slack = c.eta_slack;
  base.inner.tol = c.inner_tol;
  base.inner.max_iter = c.inner_max_iter;
  base.trace_every = c.trace_every;
  base.parallel_blocks = c.parallel_blocks;
  base.validate();

  const fs::path dir = output_dir(c.out_dir);
  ensure_dir(dir);

  json summary;
  summary["manifest"] = c.manifest;
  summary["iterations"] = c.iterations;
  summary["beta"] = c.beta;
  summary["eta_slack"] = c.eta_slack;

  std::optional<SaddleEstimate> saddle;
  if (c.iterations > 0) {
    SaddleOptions so;
    so.solver = base;
    so.solver.algorithm = default_reference_algorithm(problem);
    so.solver.parallel_blocks = false;
    so.reference_iters = c.reference_iters > 0 ? c.reference_iters : 10 * c.iterations;
    saddle = estimate_saddle(problem, so);
    summary["saddle"] = {{"algorithm", std::string(to_string(so.solver.algorithm))},
                         {"reference_iters", so.reference_iters},
                         {"f_star", saddle->f_star},
                         {"residual", saddle->residual},
                         {"residual_floor", saddle->residual_floor},
                         {"provenance", saddle->provenance}};
  }

  int code = kOk;
  for (Algorithm alg : algs) {
    SolverConfig cfg = base;
    cfg.algorithm = alg;
    const std::string name(to_string(alg));
    RunHooks hooks;
    if (saddle) hooks = conv_monitor(*saddle, conv_penalty(alg, problem, cfg));

    std::vector<TraceRecord> trace;
    json entry;
    try {
      RunResult result = run_solver(problem, cfg, {}, {}, hooks);
      trace = std::move(result.trace);
      entry["inner_unconverged_steps"] = result.inner_unconverged_steps;
      entry["status"] = "ok";
    } catch (const SolverDivergence& e) {
      trace = e.trace();
      entry["status"] = "diverged";
      entry["error"] = e.what();
      code = kNumericError;
    }
    if (saddle && is_accelerated(alg) && entry["status"] == "ok") {
      const BoundKind kind = alg == Algorithm::kFastPalm ? BoundKind::kFastPalm : BoundKind::kFastPlAdmmPs;
      fill_bounds(trace, kind, bound_constants(kind, problem, *saddle, cfg));
    }
    std::ostringstream csv;
    write_trace_csv(csv, trace, c.omit_time);
    const fs::path csv_path = dir / (name + ".csv");
    write_text(csv_path, csv.str());
    entry.update(trace_summary(trace, c.iterations));
    entry["trace"] = csv_path.filename().string();
    summary["algorithms"][name] = entry;
    out << name << ": " << csv_path.string() << '\n';
  }
  const fs::path summary_path = dir / "summary.json";
  write_text(summary_path, summary.dump(2) + "\n");
  out << "summary: " << summary_path.string() << '\n';
  return code;
}

// ----------------------------------------------------------------------- cluster

int cmd_cluster(const ClusterConfig& c, std::ostream& out) {
  Matrix x;
  std::vector<int> truth;
  std::string source;
  if (!c.data.empty()) {
    if (c.labels.empty()) throw ParameterError("cluster: --labels is required with --data");
    x = load_matrix_market(c.data);
    const Matrix l = load_matrix_market(c.labels);
    if (l.cols() != 1 || l.rows() != x.cols())
      throw DimensionError("cluster: labels must be a column with one entry per data column");
    for (Index i = 0; i < l.rows(); ++i) truth.push_back(static_cast<int>(l(i, 0)));
    source = c.data;
  } else if (!c.manifest.empty()) {
    ProblemInstance inst = load_instance(c.manifest);
    if (inst.manifest.kind != ProblemKind::kSubspace) throw ParameterError("cluster: manifest is not a subspace problem");
    x = inst.matrices.at("X");
    truth = inst.labels;
    source = c.manifest;
  } else {
    SubspaceData d = gen_union_of_subspaces(c.subspace, c.seed);
    x = std::move(d.x);
    truth = std::move(d.labels);
    source = "synthetic";
  }

  const ClusterReport report = run_cluster_pipeline(x, truth, c);
  const fs::path dir = output_dir(c.out_dir);
  ensure_dir(dir);
  std::ostringstream csv;
  write_labels_csv(csv, report.labels);
  write_text(dir / "labels.csv", csv.str());

  json j;
  j["source"] = source;
  j["algorithm"] = c.algorithm;
  j["iterations"] = c.iterations;
  j["alpha1"] = c.alpha1;
  j["alpha2"] = c.alpha2;
  j["beta"] = c.beta;
  j["points"] = static_cast<long long>(x.cols());
  j["clusters"] = *std::max_element(truth.begin(), truth.end()) + 1;
  j["accuracy"] = report.accuracy;
  j["degenerate_affinity"] = report.degenerate;
  j["isolated_points"] = report.isolated;
  j["objective"] = report.objective;
  j["feas_norm"] = report.feas_norm;
  write_text(dir / "report.json", j.dump(2) + "\n");
  out << "accuracy: " << format_double(report.accuracy) << (report.degenerate ? " (degenerate affinity)" : "")
      << '\n';
  return kOk;
}

}  // namespace

ClusterReport run_cluster_pipeline(const Matrix& x, const std::vector<int>& truth,
                                   const ClusterConfig& config) {
  if (static_cast<Index>(truth.size()) != x.cols())
    throw DimensionError("cluster: one label per data column required");
  if (truth.empty()) throw ParameterError("cluster: empty data");
  if (config.iterations < 0) throw ParameterError("cluster: iterations must be >= 0");
  const auto algorithm = parse_algorithm(config.algorithm);
  if (!algorithm) throw ParameterError("unknown algorithm '" + config.algorithm + "'");
  const int k = *std::max_element(truth.begin(), truth.end()) + 1;
  if (k < 2) throw ParameterError("cluster: need at least two true clusters");

  const BlockProblem problem = build_subspace_problem(x, config.alpha1, config.alpha2);
  SolverConfig cfg;
  cfg.algorithm = *algorithm;
  cfg.max_iters = config.iterations;
  cfg.beta_fixed = config.beta;
  cfg.eta_slack = config.eta_slack;
  cfg.trace_every = std::max(1, config.iterations);
  const RunResult result = run_solver(problem, cfg);

  ClusterReport report;
  const Matrix w = affinity(extract_representation(result.x));
  const ClusterResult clusters = spectral_cluster_detailed(w, k, config.seed);
  report.labels = clusters.labels;
  report.degenerate = clusters.degenerate;
  report.isolated = clusters.isolated;
  report.accuracy = accuracy(report.labels, truth);
  report.objective = problem.objective(result.x);
  report.feas_norm = feasibility(result.x, problem);
  return report;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, bool omit_time) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.iter << ',' << (omit_time ? std::string("0") : format_double(r.time_ms)) << ','
       << format_double(r.objective) << ',' << format_double(r.feas_norm) << ',' << format_double(r.conv_fn)
       << ',' << format_double(r.bound) << ',' << (r.inner_unconverged ? 1 : 0) << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Augmented Lagrangian solvers: problem generation, solver races and subspace clustering"};
  app.require_subcommand(1);

  GenConfig gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a problem instance (manifest + MatrixMarket files)");
  Settings gen_set(gen_cmd);
  gen_set.add_config_option();
  gen_set.add("kind", gen.kind, "lasso | three_block | subspace");
  gen_set.add("m", gen.m, "rows of A (lasso) or matrix size (three_block)");
  gen_set.add("n", gen.n, "columns of A (lasso)");
  gen_set.add("alpha", gen.alpha, "lasso weight");
  gen_set.add("alphas", gen.alphas, "three_block weights a1,a2,a3")->delimiter(',');
  gen_set.add("alpha1", gen.alpha1, "subspace nuclear-norm weight");
  gen_set.add("alpha2", gen.alpha2, "subspace l1 weight");
  gen_set.add("k_subspaces", gen.subspace.k_subspaces, "number of subspaces");
  gen_set.add("dim_ambient", gen.subspace.dim_ambient, "ambient dimension");
  gen_set.add("dim_sub", gen.subspace.dim_sub, "subspace dimension");
  gen_set.add("pts_per", gen.subspace.pts_per, "points per subspace");
  gen_set.add("noise", gen.subspace.noise, "noise standard deviation");
  gen_set.flag("orthogonal", gen.subspace.orthogonal, "mutually orthogonal subspaces");
  gen_set.add("seed", gen.seed, "generator seed");
  gen_set.add("out", gen.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");

  RaceConfig race;
  CLI::App* race_cmd = app.add_subcommand("race", "Run solvers on an instance and write trace CSVs");
  Settings race_set(race_cmd);
  race_set.add_config_option();
  race_set.add("manifest", race.manifest, "problem manifest");
  race_set.add("algorithms", race.algorithms, "palm,fast_palm,pl_admm_ps,fast_pl_admm_ps")->delimiter(',');
  race_set.add("iterations", race.iterations, "iterations per algorithm");
  race_set.add("beta", race.beta, "penalty of PALM and the PL-ADMM-PS family");
  race_set.add("eta_slack", race.eta_slack, "eta_i = eta_slack n ||A_i||^2");
  race_set.add("inner_tol", race.inner_tol, "subproblem tolerance");
  race_set.add("inner_max_iter", race.inner_max_iter, "subproblem iteration cap");
  race_set.add("reference_iters", race.reference_iters, "saddle reference run length (default 10 x iterations)");
  race_set.add("trace_every", race.trace_every, "record every n-th iteration");
  race_set.flag("parallel_blocks", race.parallel_blocks, "update blocks on separate threads");
  race_set.flag("omit_time", race.omit_time, "write 0 in the time_ms column");
  race_set.add("out", race.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");

  ClusterConfig cluster;
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "Subspace clustering on synthetic or stored data");
  Settings cl_set(cluster_cmd);
  cl_set.add_config_option();
  cl_set.add("manifest", cluster.manifest, "subspace problem manifest");
  cl_set.add("data", cluster.data, "data matrix (MatrixMarket, one point per column)");
  cl_set.add("labels", cluster.labels, "true labels (MatrixMarket column)");
  cl_set.add("k_subspaces", cluster.subspace.k_subspaces, "number of subspaces");
  cl_set.add("dim_ambient", cluster.subspace.dim_ambient, "ambient dimension");
  cl_set.add("dim_sub", cluster.subspace.dim_sub, "subspace dimension");
  cl_set.add("pts_per", cluster.subspace.pts_per, "points per subspace");
  cl_set.add("noise", cluster.subspace.noise, "noise standard deviation");
  cl_set.flag("orthogonal", cluster.subspace.orthogonal, "mutually orthogonal subspaces");
  cl_set.add("seed", cluster.seed, "data and k-means seed");
  cl_set.add("alpha1", cluster.alpha1, "nuclear-norm weight");
  cl_set.add("alpha2", cluster.alpha2, "l1 weight");
  cl_set.add("algorithm", cluster.algorithm, "solver");
  cl_set.add("iterations", cluster.iterations, "solver iterations");
  cl_set.add("beta", cluster.beta, "penalty");
  cl_set.add("eta_slack", cluster.eta_slack, "eta_i = eta_slack n ||A_i||^2");
  cl_set.add("out", cluster.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParameterError;
  }

  try {
    if (gen_cmd->parsed()) {
      gen_set.apply_config();
      return cmd_gen(gen, out);
    }
    if (race_cmd->parsed()) {
      race_set.apply_config();
      return cmd_race(race, out);
    }
    cl_set.apply_config();
    return cmd_cluster(cluster, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  } catch (const std::out_of_range& e) {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  }
}

}  // namespace fastalm::cli
