#pragma once

#include <string>
#include <vector>

#include "fastalm/problem.hpp"
#include "fastalm/solvers.hpp"

namespace fastalm {

/// Empirical saddle point (x*, lam*) obtained from a long reference run.
struct SaddleEstimate {
  BlockPoint x_star;
  Matrix lam_star;
  double f_star = 0.0;
  /// ||A(x) - b|| of the reference run's final iterate, before polishing.
  double residual_floor = 0.0;
  /// ||A(x*) - b|| of the returned point.
  double residual = 0.0;
  std::string provenance;
};

/// ||A(x) - b||_F.
double feasibility(const BlockPoint& x, const BlockProblem& problem);

/// f(x) - f(x*) + <lam*, A(x) - b> + penalty ||A(x) - b||^2.
///
/// penalty = 1/2 gives the accelerated PALM metric, penalty = beta alpha / 2
/// the PL-ADMM-PS one (see admm_alpha).
double conv_function(const BlockPoint& x, const SaddleEstimate& saddle, const BlockProblem& problem,
                     double penalty);
/// Same, from an already evaluated objective and residual A(x) - b.
double conv_function(double objective, const Matrix& residual, const SaddleEstimate& saddle,
                     double penalty);

enum class BoundKind { kFastPalm, kFastPlAdmmPs };

struct BoundConstants {
  /// L for Fast PALM, L_max for Fast PL-ADMM-PS.
  double lipschitz = 0.0;
  double d_x_star = 0.0;
  double d_lambda_star = 0.0;
  double beta = 1.0;
  double eta_max = 0.0;
  /// Diameters of the primal and dual sets (Fast PL-ADMM-PS only).
  double d_x = 0.0;
  double d_lambda = 0.0;
};

/// Right-hand side of the convergence-rate guarantee at iteration k:
///   Fast PALM:        2/(k+2)^2 (L Dx*^2 + Dlam*^2)
///   Fast PL-ADMM-PS:  2 Lmax Dx*^2/(k+2)^2 + 2 beta eta_max DX^2/(k+2) + 2 DLam^2/(beta (k+2))
/// Constants must be finite and >= 0; beta must be > 0.
double theorem_bound(int k, BoundKind kind, const BoundConstants& constants);

/// min{ 1/(n+1), min_i (eta_i - n ||A_i||^2) / (2 (n+1) ||A_i||^2) }.
/// Blocks with A_i = 0 impose no constraint.
double admm_alpha(const BlockProblem& problem, const std::vector<double>& eta);

/// Penalty coefficient of the convergence function for an algorithm:
/// 1/2 for the PALM family, beta alpha / 2 for the PL-ADMM-PS family.
double conv_penalty(Algorithm algorithm, const BlockProblem& problem, const SolverConfig& config);

/// Builds bound constants from the problem, the saddle estimate and the
/// initial point. The diameters d_x / d_lambda are left at zero.
BoundConstants bound_constants(BoundKind kind, const BlockProblem& problem,
                               const SaddleEstimate& saddle, const SolverConfig& config,
                               const BlockPoint& init = {}, const Matrix& dual_init = {});

/// Hook computing conv_fn for every emitted record.
RunHooks conv_monitor(const SaddleEstimate& saddle, double penalty, RunHooks base = {});

/// Fills the bound column of a finished trace. For the Fast PL-ADMM-PS
/// kind, the set diameters are replaced by the empirical proxy
/// 2 max(spread of the iterates, distance of the saddle estimate) taken from
/// the whole trace.
void fill_bounds(std::vector<TraceRecord>& trace, BoundKind kind, BoundConstants constants);

/// Least-squares slope of log(conv_fn) against log(K) over records with
/// K = iter - 1 in [k_lo, k_hi]. Records with non-positive conv_fn are
/// skipped. Returns NaN when fewer than two points qualify.
double loglog_slope(const std::vector<TraceRecord>& trace, int k_lo, int k_hi);

struct SaddleOptions {
  /// Solver used for the reference run; its max_iters is ignored.
  SolverConfig solver;
  int reference_iters = 10000;
  /// Project the final iterate onto {A(x) = b} (least-norm correction by
  /// conjugate gradients on A A^T) before evaluating f(x*).
  bool polish_feasibility = true;
};

/// Fast PALM for one block, PL-ADMM-PS otherwise.
Algorithm default_reference_algorithm(const BlockProblem& problem);

/// Long reference run from the zero point; deterministic.
/// Throws SolverDivergence if the run produces non-finite values.
SaddleEstimate estimate_saddle(const BlockProblem& problem, const SaddleOptions& options);

}  // namespace fastalm
