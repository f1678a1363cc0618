#pragma once

#include <vector>

#include "fastalm/functions.hpp"
#include "fastalm/linops.hpp"
#include "fastalm/types.hpp"

namespace fastalm {

/// Strongly convex composite subproblem
///
///   q(x) = <c, x> + h(x) + <lam, A(x)> + beta/2 ||A(x) - b||^2 + mu/2 ||x - center||^2
///
/// over a BlockPoint x, with h separable across blocks. The smooth part s
/// (everything except h) has gradient Lipschitz constant beta ||A||^2 + mu.
struct CompositeSubproblem {
  BlockPoint c;
  std::vector<ProxFn> h;
  Matrix lam;
  BlockMap a;
  Matrix b;
  double beta = 1.0;
  double mu = 1.0;
  BlockPoint center;
  double a_norm_sq = 0.0;

  double smooth_lipschitz() const { return beta * a_norm_sq + mu; }
};

struct InnerOptions {
  double tol = 1e-9;
  int max_iter = 2000;
};

struct InnerResult {
  BlockPoint x;
  bool converged = false;
  int iterations = 0;
  /// Gradient-mapping norm at x (see prox_gradient_residual).
  double residual = 0.0;
};

double subproblem_objective(const CompositeSubproblem& sub, const BlockPoint& x);
BlockPoint smooth_gradient(const CompositeSubproblem& sub, const BlockPoint& x);

/// Gradient-mapping norm Ls || x - prox_h(x - grad s(x) / Ls, 1 / Ls) ||, zero
/// exactly at the minimizer.
double prox_gradient_residual(const CompositeSubproblem& sub, const BlockPoint& x);

/// Monotone accelerated proximal gradient (MFISTA) with constant step 1/Ls,
/// warm-started. Returns the first monotone iterate whose prox-gradient
/// residual is <= tol, or the last iterate flagged unconverged. The returned
/// point never has a larger objective than the warm start.
InnerResult fista_solve(const CompositeSubproblem& sub, const InnerOptions& options,
                        const BlockPoint& warm_start);

}  // namespace fastalm
