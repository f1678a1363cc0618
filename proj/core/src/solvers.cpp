#include "fastalm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace fastalm {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kPalm:
      return "palm";
    case Algorithm::kFastPalm:
      return "fast_palm";
    case Algorithm::kPlAdmmPs:
      return "pl_admm_ps";
    case Algorithm::kFastPlAdmmPs:
      return "fast_pl_admm_ps";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kPalm, Algorithm::kFastPalm, Algorithm::kPlAdmmPs,
                 Algorithm::kFastPlAdmmPs}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

bool is_accelerated(Algorithm a) {
  return a == Algorithm::kFastPalm || a == Algorithm::kFastPlAdmmPs;
}

void SolverConfig::validate() const {
  if (max_iters < 0) throw ParameterError("max_iters must be >= 0");
  if (!(beta_fixed > 0.0) || !std::isfinite(beta_fixed))
    throw ParameterError("beta must be finite and > 0");
  if (!(eta_slack > 1.0) || !std::isfinite(eta_slack))
    throw ParameterError("eta_slack must be > 1 (eta_i must exceed n ||A_i||^2)");
  if (!(inner.tol > 0.0)) throw ParameterError("inner tolerance must be > 0");
  if (inner.max_iter < 0) throw ParameterError("inner max_iter must be >= 0");
  if (trace_every < 1) throw ParameterError("trace_every must be >= 1");
}

SolverDivergence::SolverDivergence(int iteration, std::vector<TraceRecord> trace)
    : NumericError("non-finite iterate at iteration " + std::to_string(iteration)),
      iteration_(iteration),
      trace_(std::move(trace)) {}

std::vector<double> block_etas(const BlockProblem& problem, double eta_slack) {
  const double n = static_cast<double>(problem.size());
  std::vector<double> eta;
  eta.reserve(problem.size());
  for (std::size_t i = 0; i < problem.size(); ++i) eta.push_back(eta_slack * n * problem.a_norm_sq(i));
  return eta;
}

namespace {

using Clock = std::chrono::steady_clock;

SolverState initial_state(const BlockProblem& problem, const BlockPoint& init,
                          const Matrix& dual_init) {
  SolverState s;
  if (init.empty()) {
    s.x = zeros(problem.shapes());
  } else {
    problem.check_point(init, "initial point");
    s.x = init;
  }
  if (dual_init.size() == 0) {
    s.lam = Matrix::Zero(problem.b().rows(), problem.b().cols());
  } else {
    require_shape(dual_init, shape_of(problem.b()), "initial dual");
    s.lam = dual_init;
  }
  s.z = s.x;
  s.y = s.x;
  return s;
}

/// Trace bookkeeping shared by the four solvers.
class Recorder {
 public:
  Recorder(const BlockProblem& problem, const SolverConfig& config, const RunHooks& hooks,
           const SolverState& start)
      : problem_(problem), config_(config), hooks_(hooks), z0_(start.z), lam0_(start.lam) {
    trace_.reserve(static_cast<std::size_t>(config.max_iters / config.trace_every + 1));
  }

  void step(const SolverState& s, double time_ms, const InnerResult* inner) {
    z_spread_ = std::max(z_spread_, distance(s.z, z0_));
    dual_spread_ = std::max(dual_spread_, (s.lam - lam0_).norm());
    if (inner && !inner->converged) ++inner_unconverged_;

    if (!all_finite(s.x) || !all_finite(s.z) || !s.lam.allFinite())
      throw SolverDivergence(s.k, std::move(trace_));

    const bool last = s.k == config_.max_iters;
    if (s.k % config_.trace_every != 0 && !last) return;

    TraceRecord r;
    r.iter = s.k;
    r.time_ms = time_ms;
    r.objective = problem_.objective(s.x);
    const Matrix residual = problem_.residual(s.x);
    r.feas_norm = residual.norm();
    r.inner_unconverged = inner && !inner->converged;
    r.inner_iterations = inner ? inner->iterations : 0;
    r.theta = s.theta.theta;
    r.beta = s.beta;
    r.max_block_norm = max_block_norm(s.z);
    r.z_spread = z_spread_;
    r.dual_spread = dual_spread_;
    if (!std::isfinite(r.objective)) throw SolverDivergence(s.k, std::move(trace_));
    if (hooks_.evaluate) hooks_.evaluate(r, s, residual);
    if (hooks_.on_trace) hooks_.on_trace(r);
    trace_.push_back(r);
  }

  RunResult finish(SolverState s) {
    RunResult out;
    out.x = s.x;
    out.lam = s.lam;
    out.state = std::move(s);
    out.trace = std::move(trace_);
    out.inner_unconverged_steps = inner_unconverged_;
    return out;
  }

 private:
  const BlockProblem& problem_;
  const SolverConfig& config_;
  const RunHooks& hooks_;
  BlockPoint z0_;
  Matrix lam0_;
  double z_spread_ = 0.0;
  double dual_spread_ = 0.0;
  int inner_unconverged_ = 0;
  std::vector<TraceRecord> trace_;
};

BlockPoint gradients(const BlockProblem& problem, const BlockPoint& at) {
  BlockPoint g;
  g.reserve(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) g.push_back(problem.block(i).g.grad(at[i]));
  return g;
}

std::vector<ProxFn> prox_terms(const BlockProblem& problem) {
  std::vector<ProxFn> h;
  for (const auto& blk : problem.blocks()) h.push_back(blk.h);
  return h;
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Runs body(i) for every block, optionally one thread per block.
template <class Body>
void for_each_block(std::size_t n, bool parallel, Body&& body) {
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> workers;
    workers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      workers.emplace_back([&, i] {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Shared by PALM and Fast PALM: all blocks form one superblock whose smooth
// part has Lipschitz constant max_i L_i.
CompositeSubproblem superblock_subproblem(const BlockProblem& problem, BlockPoint c,
                                          const Matrix& lam, double beta, double mu,
                                          const BlockPoint& center) {
  CompositeSubproblem sub;
  sub.c = std::move(c);
  sub.h = prox_terms(problem);
  sub.lam = lam;
  sub.a = problem.map();
  sub.b = problem.b();
  sub.beta = beta;
  sub.mu = mu;
  sub.center = center;
  sub.a_norm_sq = problem.total_a_norm_sq();
  return sub;
}

}  // namespace

RunResult palm_run(const BlockProblem& problem, const SolverConfig& config, const BlockPoint& init,
                   const Matrix& dual_init, const RunHooks& hooks) {
  config.validate();
  SolverState s = initial_state(problem, init, dual_init);
  s.beta = config.beta_fixed;
  Recorder rec(problem, config, hooks, s);
  const double lip = problem.max_lipschitz();

  for (int k = 0; k < config.max_iters; ++k) {
    const auto t0 = Clock::now();
    std::optional<SolverState> before;
    if (hooks.on_step) before = s;

    auto sub = superblock_subproblem(problem, gradients(problem, s.x), s.lam, s.beta, lip, s.x);
    InnerResult inner = fista_solve(sub, config.inner, s.x);
    s.x = std::move(inner.x);
    const Matrix ax = problem.map().apply(s.x);
    s.lam = s.lam + s.beta * (ax - problem.b());
    s.z = s.x;
    s.y = s.x;
    s.k = k + 1;
    const double ms = elapsed_ms(t0);

    if (hooks.on_step) hooks.on_step(StepView{*before, s, 1.0, s.beta, nullptr, inner.converged});
    rec.step(s, ms, &inner);
  }
  return rec.finish(std::move(s));
}

RunResult fast_palm_run(const BlockProblem& problem, const SolverConfig& config,
                        const BlockPoint& init, const Matrix& dual_init, const RunHooks& hooks) {
  config.validate();
  SolverState s = initial_state(problem, init, dual_init);
  s.beta = 1.0;
  Recorder rec(problem, config, hooks, s);
  const double lip = problem.max_lipschitz();
  const std::size_t n = problem.size();

  for (int k = 0; k < config.max_iters; ++k) {
    const auto t0 = Clock::now();
    std::optional<SolverState> before;
    if (hooks.on_step) before = s;
    const double theta = s.theta.theta;
    const double beta = s.beta;

    for (std::size_t i = 0; i < n; ++i) s.y[i] = (1.0 - theta) * s.x[i] + theta * s.z[i];
    auto sub = superblock_subproblem(problem, gradients(problem, s.y), s.lam, beta, lip * theta, s.z);
    InnerResult inner = fista_solve(sub, config.inner, s.z);
    s.z = std::move(inner.x);
    for (std::size_t i = 0; i < n; ++i) s.x[i] = (1.0 - theta) * s.x[i] + theta * s.z[i];
    const Matrix az = problem.map().apply(s.z);
    s.lam = s.lam + beta * (az - problem.b());
    if (!config.force_unit_theta) {
      s.theta.advance();
      s.beta = beta_fast_palm(s.theta.theta);
    }
    s.k = k + 1;
    const double ms = elapsed_ms(t0);

    if (hooks.on_step) hooks.on_step(StepView{*before, s, theta, beta, nullptr, inner.converged});
    rec.step(s, ms, &inner);
  }
  return rec.finish(std::move(s));
}

RunResult pl_admm_ps_run(const BlockProblem& problem, const SolverConfig& config,
                         const BlockPoint& init, const Matrix& dual_init, const RunHooks& hooks) {
  config.validate();
  SolverState s = initial_state(problem, init, dual_init);
  s.beta = config.beta_fixed;
  Recorder rec(problem, config, hooks, s);
  const std::size_t n = problem.size();
  const std::vector<double> eta = block_etas(problem, config.eta_slack);
  const double beta = s.beta;
  Matrix ax = problem.map().apply(s.x);

  for (int k = 0; k < config.max_iters; ++k) {
    const auto t0 = Clock::now();
    std::optional<SolverState> before;
    if (hooks.on_step) before = s;

    const Matrix dual_hat = s.lam + beta * (ax - problem.b());
    BlockPoint next(n);
    for_each_block(n, config.parallel_blocks, [&](std::size_t i) {
      const auto& blk = problem.block(i);
      const double tau = 1.0 / (problem.lipschitz(i) + beta * eta[i]);
      next[i] = blk.h.prox(s.x[i] - tau * (blk.g.grad(s.x[i]) + blk.a.adjoint(dual_hat)), tau);
    });
    s.x = std::move(next);
    ax = problem.map().apply(s.x);
    s.lam = s.lam + beta * (ax - problem.b());
    s.z = s.x;
    s.y = s.x;
    s.k = k + 1;
    const double ms = elapsed_ms(t0);

    if (hooks.on_step) hooks.on_step(StepView{*before, s, 1.0, beta, &dual_hat, true});
    rec.step(s, ms, nullptr);
  }
  return rec.finish(std::move(s));
}

RunResult fast_pl_admm_ps_run(const BlockProblem& problem, const SolverConfig& config,
                              const BlockPoint& init, const Matrix& dual_init,
                              const RunHooks& hooks) {
  config.validate();
  SolverState s = initial_state(problem, init, dual_init);
  s.beta = config.beta_fixed;
  Recorder rec(problem, config, hooks, s);
  const std::size_t n = problem.size();
  const std::vector<double> eta = block_etas(problem, config.eta_slack);
  const double beta = s.beta;
  Matrix az = problem.map().apply(s.z);

  for (int k = 0; k < config.max_iters; ++k) {
    const auto t0 = Clock::now();
    std::optional<SolverState> before;
    if (hooks.on_step) before = s;
    const double theta = s.theta.theta;

    const Matrix dual_hat = s.lam + beta * (az - problem.b());
    BlockPoint next(n);
    for_each_block(n, config.parallel_blocks, [&](std::size_t i) {
      const auto& blk = problem.block(i);
      s.y[i] = (1.0 - theta) * s.x[i] + theta * s.z[i];
      const double tau = 1.0 / (problem.lipschitz(i) * theta + beta * eta[i]);
      next[i] = blk.h.prox(s.z[i] - tau * (blk.g.grad(s.y[i]) + blk.a.adjoint(dual_hat)), tau);
      s.x[i] = (1.0 - theta) * s.x[i] + theta * next[i];
    });
    s.z = std::move(next);
    az = problem.map().apply(s.z);
    s.lam = s.lam + beta * (az - problem.b());
    if (!config.force_unit_theta) s.theta.advance();
    s.k = k + 1;
    const double ms = elapsed_ms(t0);

    if (hooks.on_step) hooks.on_step(StepView{*before, s, theta, beta, &dual_hat, true});
    rec.step(s, ms, nullptr);
  }
  return rec.finish(std::move(s));
}

RunResult run_solver(const BlockProblem& problem, const SolverConfig& config,
                     const BlockPoint& init, const Matrix& dual_init, const RunHooks& hooks) {
  switch (config.algorithm) {
    case Algorithm::kPalm:
      return palm_run(problem, config, init, dual_init, hooks);
    case Algorithm::kFastPalm:
      return fast_palm_run(problem, config, init, dual_init, hooks);
    case Algorithm::kPlAdmmPs:
      return pl_admm_ps_run(problem, config, init, dual_init, hooks);
    case Algorithm::kFastPlAdmmPs:
      return fast_pl_admm_ps_run(problem, config, init, dual_init, hooks);
  }
  throw ParameterError("unknown algorithm");
}

}  // namespace fastalm
