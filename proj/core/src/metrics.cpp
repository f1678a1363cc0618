#include "fastalm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace fastalm {

namespace {

void require_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ParameterError(std::string("theorem_bound: ") + name + " must be finite and >= 0");
}

// Least-norm correction: returns d with A(d) = r, d = A^T(nu), nu from CG on A A^T.
BlockPoint least_norm_correction(const BlockMap& a, const Matrix& r) {
  Matrix nu = Matrix::Zero(r.rows(), r.cols());
  Matrix res = r;
  Matrix p = res;
  double rs = res.squaredNorm();
  const double stop = std::max(1e-30, 1e-28 * rs);
  const Index max_iter = std::max<Index>(50, 4 * r.size());
  for (Index it = 0; it < max_iter && rs > stop; ++it) {
    const Matrix ap = a.apply(a.adjoint(p));
    const double pap = p.cwiseProduct(ap).sum();
    if (!(pap > 0.0)) break;
    const double step = rs / pap;
    nu += step * p;
    res -= step * ap;
    const double rs_new = res.squaredNorm();
    p = res + (rs_new / rs) * p;
    rs = rs_new;
  }
  return a.adjoint(nu);
}

}  // namespace

double feasibility(const BlockPoint& x, const BlockProblem& problem) {
  return problem.residual(x).norm();
}

double conv_function(double objective, const Matrix& residual, const SaddleEstimate& saddle,
                     double penalty) {
  if (!(penalty >= 0.0)) throw ParameterError("conv_function: penalty must be >= 0");
  require_shape(residual, shape_of(saddle.lam_star), "conv_function residual");
  return objective - saddle.f_star + saddle.lam_star.cwiseProduct(residual).sum() +
         penalty * residual.squaredNorm();
}

double conv_function(const BlockPoint& x, const SaddleEstimate& saddle, const BlockProblem& problem,
                     double penalty) {
  return conv_function(problem.objective(x), problem.residual(x), saddle, penalty);
}

double theorem_bound(int k, BoundKind kind, const BoundConstants& c) {
  if (k < 0) throw ParameterError("theorem_bound: k must be >= 0");
  require_nonneg(c.lipschitz, "L");
  require_nonneg(c.d_x_star, "D_x*");
  require_nonneg(c.d_lambda_star, "D_lambda*");
  const double k2 = static_cast<double>(k) + 2.0;
  if (kind == BoundKind::kFastPalm) {
    return 2.0 / (k2 * k2) *
           (c.lipschitz * c.d_x_star * c.d_x_star + c.d_lambda_star * c.d_lambda_star);
  }
  if (!(c.beta > 0.0) || !std::isfinite(c.beta))
    throw ParameterError("theorem_bound: beta must be > 0");
  require_nonneg(c.eta_max, "eta_max");
  require_nonneg(c.d_x, "D_X");
  require_nonneg(c.d_lambda, "D_Lambda");
  return 2.0 * c.lipschitz * c.d_x_star * c.d_x_star / (k2 * k2) +
         2.0 * c.beta * c.eta_max * c.d_x * c.d_x / k2 +
         2.0 * c.d_lambda * c.d_lambda / (c.beta * k2);
}

double admm_alpha(const BlockProblem& problem, const std::vector<double>& eta) {
  if (eta.size() != problem.size()) throw DimensionError("admm_alpha: one eta per block");
  const double n = static_cast<double>(problem.size());
  double alpha = 1.0 / (n + 1.0);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double a2 = problem.a_norm_sq(i);
    if (a2 <= 0.0) continue;
    alpha = std::min(alpha, (eta[i] - n * a2) / (2.0 * (n + 1.0) * a2));
  }
  return alpha;
}

double conv_penalty(Algorithm algorithm, const BlockProblem& problem, const SolverConfig& config) {
  if (algorithm == Algorithm::kPalm || algorithm == Algorithm::kFastPalm) return 0.5;
  const double alpha = admm_alpha(problem, block_etas(problem, config.eta_slack));
  return 0.5 * config.beta_fixed * alpha;
}

BoundConstants bound_constants(BoundKind kind, const BlockProblem& problem,
                               const SaddleEstimate& saddle, const SolverConfig& config,
                               const BlockPoint& init, const Matrix& dual_init) {
  const BlockPoint x0 = init.empty() ? zeros(problem.shapes()) : init;
  const Matrix lam0 = dual_init.size() == 0
                          ? Matrix::Zero(saddle.lam_star.rows(), saddle.lam_star.cols())
                          : dual_init;
  BoundConstants c;
  c.lipschitz = problem.max_lipschitz();
  c.d_x_star = distance(x0, saddle.x_star);
  c.d_lambda_star = (lam0 - saddle.lam_star).norm();
  if (kind == BoundKind::kFastPlAdmmPs) {
    c.beta = config.beta_fixed;
    const auto eta = block_etas(problem, config.eta_slack);
    c.eta_max = *std::max_element(eta.begin(), eta.end());
  }
  return c;
}

RunHooks conv_monitor(const SaddleEstimate& saddle, double penalty, RunHooks base) {
  auto previous = std::move(base.evaluate);
  auto ref = std::make_shared<const SaddleEstimate>(saddle);
  base.evaluate = [ref, penalty, previous](TraceRecord& r, const SolverState& s,
                                           const Matrix& residual) {
    r.conv_fn = conv_function(r.objective, residual, *ref, penalty);
    if (previous) previous(r, s, residual);
  };
  return base;
}

void fill_bounds(std::vector<TraceRecord>& trace, BoundKind kind, BoundConstants constants) {
  if (trace.empty()) return;
  if (kind == BoundKind::kFastPlAdmmPs) {
    const auto& last = trace.back();
    constants.d_x = 2.0 * std::max(last.z_spread, constants.d_x_star);
    constants.d_lambda = 2.0 * std::max(last.dual_spread, constants.d_lambda_star);
  }
  for (auto& r : trace) r.bound = theorem_bound(r.iter - 1, kind, constants);
}

double loglog_slope(const std::vector<TraceRecord>& trace, int k_lo, int k_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : trace) {
    const int k = r.iter - 1;
    if (k < k_lo || k > k_hi || k < 1) continue;
    if (!(r.conv_fn > 0.0) || !std::isfinite(r.conv_fn)) continue;
    const double lx = std::log(static_cast<double>(k));
    const double ly = std::log(r.conv_fn);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

Algorithm default_reference_algorithm(const BlockProblem& problem) {
  return problem.size() == 1 ? Algorithm::kFastPalm : Algorithm::kPlAdmmPs;
}

SaddleEstimate estimate_saddle(const BlockProblem& problem, const SaddleOptions& options) {
  if (options.reference_iters < 1) throw ParameterError("estimate_saddle: reference_iters must be >= 1");
  SolverConfig cfg = options.solver;
  cfg.max_iters = options.reference_iters;
  cfg.trace_every = options.reference_iters;
  cfg.force_unit_theta = false;
  RunResult run = run_solver(problem, cfg);

  SaddleEstimate est;
  est.x_star = std::move(run.x);
  est.lam_star = std::move(run.lam);
  Matrix r = problem.residual(est.x_star);
  est.residual_floor = r.norm();
  if (options.polish_feasibility && est.residual_floor > 0.0) {
    const BlockPoint d = least_norm_correction(problem.map(), r);
    BlockPoint polished = combine(1.0, est.x_star, -1.0, d);
    const double polished_res = problem.residual(polished).norm();
    if (polished_res < est.residual_floor && all_finite(polished)) est.x_star = std::move(polished);
  }
  est.residual = problem.residual(est.x_star).norm();
  est.f_star = problem.objective(est.x_star);
  est.provenance = std::string(to_string(cfg.algorithm)) + " reference run, " +
                   std::to_string(options.reference_iters) + " iterations" +
                   (options.polish_feasibility ? ", least-norm feasibility correction" : "");
  return est;
}

}  // namespace fastalm
