#include "fastalm/inner.hpp"

#include <cmath>

#include "fastalm/error.hpp"

namespace fastalm {

namespace {

void validate(const CompositeSubproblem& sub) {
  const std::size_t n = sub.a.size();
  if (n == 0) throw ParameterError("subproblem: empty block map");
  if (sub.c.size() != n || sub.h.size() != n || sub.center.size() != n)
    throw DimensionError("subproblem: block counts of c, h, center and A differ");
  require_shape(sub.lam, sub.a.output_shape(), "subproblem dual");
  require_shape(sub.b, sub.a.output_shape(), "subproblem rhs");
  const auto shapes = sub.a.input_shapes();
  for (std::size_t i = 0; i < n; ++i) {
    require_shape(sub.c[i], shapes[i], "subproblem linear term");
    require_shape(sub.center[i], shapes[i], "subproblem prox center");
  }
  if (!(sub.beta > 0.0)) throw ParameterError("subproblem: beta must be > 0");
  if (!(sub.mu >= 0.0)) throw ParameterError("subproblem: mu must be >= 0");
  if (!(sub.smooth_lipschitz() > 0.0))
    throw ParameterError("subproblem: smooth part has zero curvature");
}

// Objective given the precomputed image ax = A(x).
double objective_at(const CompositeSubproblem& sub, const BlockPoint& x, const Matrix& ax) {
  double q = dot(sub.c, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    q += sub.h[i].value(x[i]);
    q += 0.5 * sub.mu * (x[i] - sub.center[i]).squaredNorm();
  }
  q += sub.lam.cwiseProduct(ax).sum();
  q += 0.5 * sub.beta * (ax - sub.b).squaredNorm();
  return q;
}

BlockPoint gradient_at(const CompositeSubproblem& sub, const BlockPoint& x, const Matrix& ax) {
  const Matrix dual = sub.lam + sub.beta * (ax - sub.b);
  BlockPoint g = sub.a.adjoint(dual);
  for (std::size_t i = 0; i < x.size(); ++i) g[i] += sub.c[i] + sub.mu * (x[i] - sub.center[i]);
  return g;
}

BlockPoint prox_step(const CompositeSubproblem& sub, const BlockPoint& x, const BlockPoint& g,
                     double ls) {
  BlockPoint out;
  out.reserve(x.size());
  const double step = 1.0 / ls;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(sub.h[i].prox(x[i] - step * g[i], step));
  return out;
}

double residual_at(const CompositeSubproblem& sub, const BlockPoint& x, const Matrix& ax) {
  const double ls = sub.smooth_lipschitz();
  return ls * distance(x, prox_step(sub, x, gradient_at(sub, x, ax), ls));
}

}  // namespace

double subproblem_objective(const CompositeSubproblem& sub, const BlockPoint& x) {
  validate(sub);
  return objective_at(sub, x, sub.a.apply(x));
}

BlockPoint smooth_gradient(const CompositeSubproblem& sub, const BlockPoint& x) {
  validate(sub);
  return gradient_at(sub, x, sub.a.apply(x));
}

double prox_gradient_residual(const CompositeSubproblem& sub, const BlockPoint& x) {
  validate(sub);
  return residual_at(sub, x, sub.a.apply(x));
}

InnerResult fista_solve(const CompositeSubproblem& sub, const InnerOptions& options,
                        const BlockPoint& warm_start) {
  validate(sub);
  if (!(options.tol > 0.0)) throw ParameterError("fista_solve: tol must be > 0");
  if (options.max_iter < 0) throw ParameterError("fista_solve: max_iter must be >= 0");
  if (warm_start.size() != sub.a.size()) throw DimensionError("fista_solve: warm start block count");
  const auto shapes = sub.a.input_shapes();
  for (std::size_t i = 0; i < shapes.size(); ++i)
    require_shape(warm_start[i], shapes[i], "fista_solve warm start");

  const double ls = sub.smooth_lipschitz();

  InnerResult result;
  BlockPoint x = warm_start;
  Matrix ax = sub.a.apply(x);
  double qx = objective_at(sub, x, ax);

  result.residual = residual_at(sub, x, ax);
  if (result.residual <= options.tol) {
    result.x = std::move(x);
    result.converged = true;
    return result;
  }

  BlockPoint y = x;
  Matrix ay = ax;
  double t = 1.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    result.iterations = it;
    BlockPoint z = prox_step(sub, y, gradient_at(sub, y, ay), ls);
    Matrix az = sub.a.apply(z);
    const double qz = objective_at(sub, z, az);
    const double step_norm = distance(y, z);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double wz = t / t_next;
    const double wd = (t - 1.0) / t_next;

    // Monotone selection between the prox point and the previous iterate.
    BlockPoint x_prev = x;
    Matrix ax_prev = ax;
    if (qz <= qx) {
      x = std::move(z);
      ax = std::move(az);
      qx = qz;
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + wd * (x[i] - x_prev[i]);
      ay = ax + wd * (ax - ax_prev);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + wz * (z[i] - x[i]);
      ay = ax + wz * (az - ax);
    }
    t = t_next;

    if (!std::isfinite(qx)) throw NumericError("fista_solve: non-finite objective");

    if (ls * step_norm <= options.tol) {
      result.residual = residual_at(sub, x, ax);
      if (result.residual <= options.tol) {
        result.x = std::move(x);
        result.converged = true;
        return result;
      }
    }
  }
  result.residual = residual_at(sub, x, ax);
  result.converged = result.residual <= options.tol;
  result.x = std::move(x);
  return result;
}

}  // namespace fastalm
