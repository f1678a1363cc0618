#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "cli.hpp"
#include "fastalm/cluster.hpp"
#include "fastalm/functions.hpp"
#include "fastalm/metrics.hpp"
#include "fastalm/problems.hpp"
#include "fastalm/rng.hpp"
#include "fastalm/schedule.hpp"
#include "fastalm/solvers.hpp"

namespace fs = std::filesystem;
using namespace fastalm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void log(const std::string& msg) { std::fprintf(stderr, "  %s\n", msg.c_str()); }

SolverConfig solver_config(Algorithm alg, int iters) {
  SolverConfig c;
  c.algorithm = alg;
  c.max_iters = iters;
  return c;
}

SaddleEstimate reference(const BlockProblem& p, const std::string& name) {
  const auto t0 = std::chrono::steady_clock::now();
  SaddleOptions so;
  so.solver.algorithm = default_reference_algorithm(p);
  so.reference_iters = 10000;
  auto s = estimate_saddle(p, so);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log(name + " reference: " + std::string(to_string(so.solver.algorithm)) + " x10000, residual floor " +
      fmt(s.residual_floor) + ", " + fmt(sec) + " s");
  return s;
}

std::vector<TraceRecord> monitored_run(const BlockProblem& p, Algorithm alg, int iters,
                                       const SaddleEstimate& saddle, bool with_bound) {
  const SolverConfig c = solver_config(alg, iters);
  auto trace = run_solver(p, c, {}, {}, conv_monitor(saddle, conv_penalty(alg, p, c))).trace;
  if (with_bound) {
    const BoundKind kind = alg == Algorithm::kFastPalm ? BoundKind::kFastPalm : BoundKind::kFastPlAdmmPs;
    fill_bounds(trace, kind, bound_constants(kind, p, saddle, c));
  }
  return trace;
}

const TraceRecord& at_iter(const std::vector<TraceRecord>& trace, int iter) {
  return trace.at(static_cast<std::size_t>(iter - 1));
}

// ----------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  ThetaState s;
  double worst_step = 0.0, worst_sum = 0.0;
  bool below = true;
  for (std::int64_t k = 0; k <= 100000; ++k) {
    const double th = s.theta;
    below = below && th <= 2.0 / (static_cast<double>(k) + 2.0);
    worst_sum = std::max(worst_sum, std::abs(s.inv_theta_sum - 1.0 / (th * th)) * th * th);
    s.advance();
    const double lhs = (1.0 - s.theta) / (s.theta * s.theta);
    const double rhs = 1.0 / (th * th);
    worst_step = std::max(worst_step, std::abs(lhs - rhs) / rhs);
  }
  o.check(worst_step <= 1e-12, "recurrence rel err " + fmt(worst_step) + " <= 1e-12");
  o.check(below, "theta(k) <= 2/(k+2)");
  o.check(worst_sum <= 1e-10, "sum identity rel err " + fmt(worst_sum) + " <= 1e-10");
  return o;
}

double nuclear_objective(const Matrix& x, const Matrix& a, double w, double tau) {
  return w * Eigen::JacobiSVD<Matrix>(x).singularValues().sum() + (x - a).squaredNorm() / (2.0 * tau);
}

// Subgradient method for w ||X||_* + ||X - A||^2 / (2 tau), strongly convex with
// modulus 1/tau; step tau / (k + 1), best objective kept.
double nuclear_subgradient_oracle(const Matrix& a, double w, double tau, int iters) {
  Matrix x = a;
  double best = nuclear_objective(x, a, w, tau);
  for (int k = 0; k < iters; ++k) {
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix g = (x - a) / tau;
    const auto& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 0.0) g += w * svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
    x -= tau / (k + 1.0) * g;
    best = std::min(best, nuclear_objective(x, a, w, tau));
  }
  return best;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(2024);
  double l1_err = 0.0, l21_err = 0.0, nuc_gap = 0.0, nuc_below = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double w = 0.1 + 1.9 * rng.uniform();
    const double tau = 0.1 + 1.9 * rng.uniform();

    const Matrix a = rng.normal_matrix(3, 2) * 2.0;
    const Matrix p = ProxFn::l1(w).prox(a, tau);
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < a.rows(); ++i) {
        const double ai = a(i, j);
        double best = std::numeric_limits<double>::infinity(), arg = 0.0;
        const double lo = -std::abs(ai) - 1.0, hi = std::abs(ai) + 1.0;
        for (double x = lo; x <= hi; x += 1e-4) {
          const double v = w * std::abs(x) + (x - ai) * (x - ai) / (2.0 * tau);
          if (v < best) {
            best = v;
            arg = x;
          }
        }
        l1_err = std::max(l1_err, std::abs(p(i, j) - arg));
      }

    const Matrix c = rng.normal_matrix(4, 3) * 2.0;
    const Matrix q = ProxFn::l21(w).prox(c, tau);
    for (Index j = 0; j < c.cols(); ++j) {
      const double r = c.col(j).norm();
      double best = std::numeric_limits<double>::infinity(), arg = 0.0;
      for (double s = 0.0; s <= r + 1e-4; s += 1e-4) {
        const double v = w * s + (s - r) * (s - r) / (2.0 * tau);
        if (v < best) {
          best = v;
          arg = s;
        }
      }
      const Matrix oracle = r > 0.0 ? Matrix(c.col(j) * (arg / r)) : Matrix(Matrix::Zero(c.rows(), 1));
      l21_err = std::max(l21_err, (q.col(j) - oracle).cwiseAbs().maxCoeff());
    }

    const Matrix m = rng.normal_matrix(3, 3);
    const double prox_val = nuclear_objective(ProxFn::nuclear(w).prox(m, tau), m, w, tau);
    const double oracle_val = nuclear_subgradient_oracle(m, w, tau, 20000);
    nuc_gap = std::max(nuc_gap, std::abs(prox_val - oracle_val));
    nuc_below = std::max(nuc_below, prox_val - oracle_val);
  }
  o.check(l1_err <= 5e-4, "l1 max err " + fmt(l1_err) + " <= 5e-4");
  o.check(l21_err <= 5e-4, "l21 max err " + fmt(l21_err) + " <= 5e-4");
  o.check(nuc_gap <= 1e-4, "nuclear objective gap " + fmt(nuc_gap) + " <= 1e-4");
  o.check(nuc_below <= 1e-12, "nuclear prox not worse than oracle (" + fmt(nuc_below) + ")");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto p = gen_lasso_simplex(20, 50, 1.0, 7);
  auto iterates = [&](Algorithm alg, bool unit) {
    std::vector<std::pair<Matrix, Matrix>> out;
    SolverConfig c = solver_config(alg, 20);
    c.force_unit_theta = unit;
    RunHooks hooks;
    hooks.on_step = [&](const StepView& v) { out.emplace_back(v.after.x[0], v.after.lam); };
    run_solver(p, c, {}, {}, hooks);
    return out;
  };
  const auto fast = iterates(Algorithm::kFastPalm, true);
  const auto plain = iterates(Algorithm::kPalm, false);
  double worst = 0.0;
  for (std::size_t k = 0; k < plain.size(); ++k) {
    const double scale = std::max({1.0, plain[k].first.cwiseAbs().maxCoeff(), plain[k].second.cwiseAbs().maxCoeff()});
    worst = std::max(worst, (fast[k].first - plain[k].first).cwiseAbs().maxCoeff() / scale);
    worst = std::max(worst, (fast[k].second - plain[k].second).cwiseAbs().maxCoeff() / scale);
  }
  o.check(fast.size() == 20 && plain.size() == 20, "20 iterations each");
  o.check(worst <= std::numeric_limits<double>::epsilon(), "max rel diff " + fmt(worst) + " <= eps");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto p = gen_lasso_simplex(100, 300, 1.0, 42);
  const auto saddle = reference(p, "lasso");
  const auto fast = monitored_run(p, Algorithm::kFastPalm, 1000, saddle, true);
  const auto plain = monitored_run(p, Algorithm::kPalm, 1000, saddle, false);
  double worst_ratio = 0.0;
  for (const auto& r : fast) {
    const int k = r.iter - 1;
    if (k >= 10 && k <= 1000) worst_ratio = std::max(worst_ratio, r.conv_fn / r.bound);
  }
  const double fast_slope = loglog_slope(fast, 100, 1000);
  const double plain_slope = loglog_slope(plain, 100, 1000);
  o.check(worst_ratio <= 1.05, "max conv/bound " + fmt(worst_ratio) + " <= 1.05");
  o.check(fast_slope <= -1.5, "fast_palm slope " + fmt(fast_slope) + " <= -1.5");
  o.check(plain_slope >= -1.3, "palm slope " + fmt(plain_slope) + " >= -1.3");
  o.check(fast.back().conv_fn < plain.back().conv_fn,
          "final fast " + fmt(fast.back().conv_fn) + " < palm " + fmt(plain.back().conv_fn));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto p = gen_three_block(100, kDefaultThreeBlockAlphas, seed);
    const std::string tag = "seed " + std::to_string(seed);
    const auto saddle = reference(p, "three_block " + tag);
    const auto fast = monitored_run(p, Algorithm::kFastPlAdmmPs, 3000, saddle, true);
    const auto plain = monitored_run(p, Algorithm::kPlAdmmPs, 3000, saddle, false);
    const double cf = at_iter(fast, 1001).conv_fn;
    const double cp = at_iter(plain, 1001).conv_fn;
    o.check(cf < cp, tag + " K=1000 fast " + fmt(cf) + " < plain " + fmt(cp));
    o.check(fast.back().feas_norm < 1e-2,
            tag + " fast feas@3000 " + fmt(fast.back().feas_norm) + " < 1e-2");
    o.check(plain.back().feas_norm < 1e-2, tag + " plain feas@3000 " + fmt(plain.back().feas_norm) + " < 1e-2");
    double worst = 0.0;
    for (const auto& r : fast) worst = std::max(worst, r.conv_fn / r.bound);
    o.check(worst <= 1.05, tag + " max conv/bound " + fmt(worst) + " <= 1.05");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto lasso = gen_lasso_simplex(100, 300, 1.0, 42);
  const auto three = gen_three_block(100, kDefaultThreeBlockAlphas, 1);
  const auto sub_data = gen_union_of_subspaces(SubspaceParams{}, 11);
  const auto sub = build_subspace_problem(sub_data.x, 0.1, 0.01);
  struct Case {
    std::string name;
    const BlockProblem* problem;
    std::vector<Algorithm> algs;
  };
  const std::vector<Case> cases{{"lasso", &lasso, {Algorithm::kPalm, Algorithm::kFastPalm}},
                                {"three_block", &three, {Algorithm::kPlAdmmPs, Algorithm::kFastPlAdmmPs}},
                                {"subspace", &sub, {Algorithm::kPlAdmmPs, Algorithm::kFastPlAdmmPs}}};
  for (const auto& c : cases) {
    const auto saddle = reference(*c.problem, c.name);
    for (Algorithm alg : c.algs) {
      const SolverConfig cfg = solver_config(alg, 1000);
      const double at_star = conv_function(saddle.x_star, saddle, *c.problem, conv_penalty(alg, *c.problem, cfg));
      o.check(std::abs(at_star) <= 1e-6,
              c.name + " " + std::string(to_string(alg)) + " conv(x*) " + fmt(at_star) + " <= 1e-6");
      const auto trace = monitored_run(*c.problem, alg, 1000, saddle, false);
      double lowest = std::numeric_limits<double>::infinity();
      for (const auto& r : trace) lowest = std::min(lowest, r.conv_fn);
      o.check(lowest >= -1e-6, c.name + " " + std::string(to_string(alg)) + " min conv " + fmt(lowest) + " >= -1e-6");
    }
  }
  return o;
}

double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += perm[static_cast<std::size_t>(pred[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

Outcome criterion7() {
  Outcome o;
  const auto data = gen_union_of_subspaces(SubspaceParams{}, 11);
  cli::ClusterConfig cfg;
  cfg.seed = 11;
  cfg.iterations = 1000;
  cfg.algorithm = "fast_pl_admm_ps";
  const double fast = cli::run_cluster_pipeline(data.x, data.labels, cfg).accuracy;
  cfg.algorithm = "pl_admm_ps";
  const double plain = cli::run_cluster_pipeline(data.x, data.labels, cfg).accuracy;
  o.check(fast >= plain, "fast accuracy " + fmt(fast) + " >= plain " + fmt(plain));
  o.check(fast >= 0.8 && plain >= 0.8, "both >= 0.8");

  Rng rng(77);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const int k = 1 + static_cast<int>(rng.below(5));
    const std::size_t n = 1 + rng.below(40);
    std::vector<int> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      truth[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    }
    if (accuracy(pred, truth) != brute_force_accuracy(pred, truth, k)) ++mismatches;
  }
  o.check(mismatches == 0, "accuracy vs permutation oracle: " + std::to_string(mismatches) + " mismatches in 500");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome criterion8() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "fastalm_acceptance_c8";
  fs::remove_all(root);
  std::ostringstream out, err;
  bool same = true;
  for (const std::string kind : {"lasso", "three_block"}) {
    const fs::path inst = root / kind;
    std::vector<std::string> gen{"gen", "--kind", kind, "--m", "20", "--seed", "5", "--out", inst.string()};
    if (kind == "lasso") gen.insert(gen.end(), {"--n", "50"});
    if (cli::run(gen, out, err) != cli::kOk) {
      o.check(false, "gen " + kind + ": " + err.str());
      return o;
    }
    std::vector<std::string> files;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (kind + "_run" + std::to_string(rep));
      const int code = cli::run({"race", "--manifest", (inst / "manifest.json").string(), "--iterations", "200",
                                 "--omit-time", "--out", dir.string()},
                                out, err);
      std::string all;
      for (const char* alg : {"palm", "fast_palm", "pl_admm_ps", "fast_pl_admm_ps"})
        if (fs::exists(dir / (std::string(alg) + ".csv"))) all += slurp(dir / (std::string(alg) + ".csv"));
      same = same && code == cli::kOk && !all.empty();
      files.push_back(all);
    }
    same = same && files[0] == files[1];
  }
  fs::remove_all(root);
  o.check(same, "byte-identical trace CSVs");

  const auto lasso = gen_lasso_simplex(20, 50, 1.0, 7);
  const auto three = gen_three_block(20, kDefaultThreeBlockAlphas, 2);
  const auto sub_data = gen_union_of_subspaces(SubspaceParams{3, 10, 2, 8, 0.01, false}, 4);
  const auto sub = build_subspace_problem(sub_data.x, 0.1, 0.01);
  const double eps = std::numeric_limits<double>::epsilon();
  double interp = 0.0, dual = 0.0, zstep = 0.0;
  int checks = 0;

  struct Case {
    const BlockProblem* problem;
    Algorithm alg;
  };
  for (const Case& c : {Case{&lasso, Algorithm::kPalm}, Case{&lasso, Algorithm::kFastPalm},
                        Case{&three, Algorithm::kPlAdmmPs}, Case{&three, Algorithm::kFastPlAdmmPs},
                        Case{&sub, Algorithm::kPlAdmmPs}, Case{&sub, Algorithm::kFastPlAdmmPs}}) {
    const BlockProblem& p = *c.problem;
    const auto eta = block_etas(p, kDefaultEtaSlack);
    const double lip = p.max_lipschitz();
    RunHooks hooks;
    hooks.on_step = [&](const StepView& v) {
      const bool accel = is_accelerated(c.alg);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Matrix expect = (1.0 - v.theta) * v.before.x[i] + v.theta * v.after.z[i];
        const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
        interp = std::max(interp, (v.after.x[i] - expect).cwiseAbs().maxCoeff() / scale / eps);
      }
      const BlockPoint& dual_point = accel ? v.after.z : v.after.x;
      const Matrix expect = v.before.lam + v.beta * (p.map().apply(dual_point) - p.b());
      const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
      dual = std::max(dual, (v.after.lam - expect).cwiseAbs().maxCoeff() / scale / eps);

      if (v.after.k % 50 != 0) return;
      ++checks;
      if (c.alg == Algorithm::kFastPalm || c.alg == Algorithm::kPalm) {
        // 0 in dh(z+) + grad g(y) + A^T(lam + beta (A z+ - b)) + mu (z+ - z).
        const double mu = lip * v.theta;
        const BlockPoint& y = accel ? v.after.y : v.before.x;
        const BlockPoint& z0 = accel ? v.before.z : v.before.x;
        const Matrix lam_plus = v.before.lam + v.beta * (p.map().apply(v.after.z) - p.b());
        for (std::size_t i = 0; i < p.size(); ++i) {
          const auto& b = p.block(i);
          const Matrix g = b.g.grad(y[i]) + b.a.adjoint(lam_plus) + mu * (v.after.z[i] - z0[i]);
          zstep = std::max(zstep, (b.h.prox(v.after.z[i] - g, 1.0) - v.after.z[i]).norm());
        }
      } else {
        // 0 in dh_i(z_i+) + grad g_i(y_i) + A_i^T lam_hat + (L_i theta + beta eta_i)(z_i+ - z_i).
        const BlockPoint& y = accel ? v.after.y : v.before.x;
        const BlockPoint& z0 = accel ? v.before.z : v.before.x;
        for (std::size_t i = 0; i < p.size(); ++i) {
          const auto& b = p.block(i);
          const double weight = p.lipschitz(i) * v.theta + v.beta * eta[i];
          const Matrix g = b.g.grad(y[i]) + b.a.adjoint(*v.dual_hat) + weight * (v.after.z[i] - z0[i]);
          zstep = std::max(zstep, (b.h.prox(v.after.z[i] - g, 1.0) - v.after.z[i]).norm());
        }
      }
    };
    const double before_zstep = zstep;
    zstep = 0.0;
    run_solver(p, solver_config(c.alg, 500), {}, {}, hooks);
    log(std::string(to_string(c.alg)) + " z-step residual " + fmt(zstep));
    zstep = std::max(zstep, before_zstep);
  }
  o.check(interp <= 4.0, "interpolation identity max err " + fmt(interp) + " eps <= 4 eps");
  o.check(dual <= 4.0, "dual identity max err " + fmt(dual) + " eps <= 4 eps");
  o.check(zstep <= 1e-6, "z-step residual " + fmt(zstep) + " <= 1e-6 over " + std::to_string(checks) + " spot checks");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; prints one PASS/FAIL line per criterion"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8); default all")->check(CLI::Range(0, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8};
  bool all = true;
  for (int i = 1; i <= 8; ++i) {
    if (only != 0 && only != i) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", i, o.pass ? "PASS" : "FAIL", sec, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
