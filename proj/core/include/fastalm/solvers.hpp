#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastalm/error.hpp"
#include "fastalm/inner.hpp"
#include "fastalm/problem.hpp"
#include "fastalm/schedule.hpp"

namespace fastalm {

enum class Algorithm { kPalm, kFastPalm, kPlAdmmPs, kFastPlAdmmPs };

std::string_view to_string(Algorithm a);
/// Accepts "palm", "fast_palm", "pl_admm_ps", "fast_pl_admm_ps".
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool is_accelerated(Algorithm a);

inline constexpr double kDefaultBeta = 1.0;
inline constexpr double kDefaultEtaSlack = 1.02;

struct SolverConfig {
  Algorithm algorithm = Algorithm::kFastPalm;
  int max_iters = 1000;
  /// Constant penalty of PALM and of both PL-ADMM-PS variants.
  double beta_fixed = kDefaultBeta;
  /// eta_i = eta_slack * n * ||A_i||^2; must exceed 1.
  double eta_slack = kDefaultEtaSlack;
  /// Subproblem solver settings of the PALM family.
  InnerOptions inner;
  /// Record every trace_every-th iteration (the last one is always recorded).
  int trace_every = 1;
  /// Run the n block updates of the PL-ADMM-PS family on separate threads.
  bool parallel_blocks = false;
  /// Hold theta at 1 (and, for Fast PALM, beta at 1). Reduces the fast
  /// variants to their plain counterparts.
  bool force_unit_theta = false;

  void validate() const;
};

/// Per-iteration diagnostics. `iter` counts completed iterations, so the
/// record with iter = K + 1 describes x^{K+1}.
struct TraceRecord {
  int iter = 0;
  double time_ms = 0.0;
  double objective = 0.0;
  double feas_norm = 0.0;
  double conv_fn = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  bool inner_unconverged = false;
  int inner_iterations = 0;
  double theta = 1.0;
  double beta = 1.0;
  /// max_i ||z_i^{k+1}||, the boundedness monitor.
  double max_block_norm = 0.0;
  /// Running maxima of ||z^j - z^0|| and ||lam^j - lam^0|| over j <= k+1.
  double z_spread = 0.0;
  double dual_spread = 0.0;
};

struct SolverState {
  BlockPoint x;
  BlockPoint z;
  BlockPoint y;
  Matrix lam;
  ThetaState theta;
  double beta = 1.0;
  int k = 0;
};

/// Read-only view of one completed iteration k -> k+1.
struct StepView {
  const SolverState& before;
  const SolverState& after;
  /// theta^(k) and beta^(k) used by the step.
  double theta;
  double beta;
  /// lam^k + beta^(k) (A(z^k) - b); set for the PL-ADMM-PS family only.
  const Matrix* dual_hat;
  bool inner_converged;
};

struct RunHooks {
  /// Fills derived fields (conv_fn, bound) of a record about to be emitted.
  /// `residual` is A(x^{k+1}) - b.
  std::function<void(TraceRecord&, const SolverState&, const Matrix& residual)> evaluate;
  std::function<void(const TraceRecord&)> on_trace;
  /// Invoked after every iteration, recorded or not.
  std::function<void(const StepView&)> on_step;
};

struct RunResult {
  BlockPoint x;
  Matrix lam;
  SolverState state;
  std::vector<TraceRecord> trace;
  int inner_unconverged_steps = 0;
};

/// Raised when an iterate becomes non-finite; carries the trace so far.
class SolverDivergence : public NumericError {
 public:
  SolverDivergence(int iteration, std::vector<TraceRecord> trace);
  int iteration() const { return iteration_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  int iteration_;
  std::vector<TraceRecord> trace_;
};

/// eta_i = eta_slack * n * ||A_i||^2 for every block.
std::vector<double> block_etas(const BlockProblem& problem, double eta_slack);

/// Proximal augmented Lagrangian method, constant beta, superblock variables.
RunResult palm_run(const BlockProblem& problem, const SolverConfig& config,
                   const BlockPoint& init = {}, const Matrix& dual_init = {},
                   const RunHooks& hooks = {});
/// Accelerated PALM with theta/beta schedules; z-subproblem solved by MFISTA.
RunResult fast_palm_run(const BlockProblem& problem, const SolverConfig& config,
                        const BlockPoint& init = {}, const Matrix& dual_init = {},
                        const RunHooks& hooks = {});
/// Proximal linearized ADMM with parallel (Jacobi) block splitting.
RunResult pl_admm_ps_run(const BlockProblem& problem, const SolverConfig& config,
                         const BlockPoint& init = {}, const Matrix& dual_init = {},
                         const RunHooks& hooks = {});
/// Accelerated PL-ADMM-PS with constant beta.
RunResult fast_pl_admm_ps_run(const BlockProblem& problem, const SolverConfig& config,
                              const BlockPoint& init = {}, const Matrix& dual_init = {},
                              const RunHooks& hooks = {});

/// Dispatches on config.algorithm.
RunResult run_solver(const BlockProblem& problem, const SolverConfig& config,
                     const BlockPoint& init = {}, const Matrix& dual_init = {},
                     const RunHooks& hooks = {});

}  // namespace fastalm
