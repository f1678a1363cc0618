#include "fastalm/linops.hpp"

#include <cmath>
#include <variant>

#include "fastalm/error.hpp"
#include "fastalm/rng.hpp"

namespace fastalm {

namespace {

struct DenseOp {
  Matrix m;
};
struct LeftMultiplyOp {
  Matrix m;
};
struct RowSumOp {};
struct IdentityOp {};
struct NegationOp {};
struct ScaleOp {
  double c;
  LinearMap inner;
};
struct VStackOp {
  std::vector<LinearMap> parts;
  std::vector<Index> offsets;  // first output row of each part
};
struct ZeroOp {};

}  // namespace

struct LinearMap::Node {
  Kind kind;
  Shape in;
  Shape out;
  std::variant<DenseOp, LeftMultiplyOp, RowSumOp, IdentityOp, NegationOp, ScaleOp, VStackOp,
               ZeroOp>
      op;
};

LinearMap LinearMap::dense(Matrix m) {
  const Shape in{m.cols(), 1}, out{m.rows(), 1};
  return LinearMap(std::make_shared<const Node>(Node{Kind::kDense, in, out, DenseOp{std::move(m)}}));
}

LinearMap LinearMap::left_multiply(Matrix m, Index cols) {
  if (cols < 1) throw ParameterError("left_multiply: column count must be >= 1");
  const Shape in{m.cols(), cols}, out{m.rows(), cols};
  return LinearMap(
      std::make_shared<const Node>(Node{Kind::kLeftMultiply, in, out, LeftMultiplyOp{std::move(m)}}));
}

LinearMap LinearMap::row_sum(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw ParameterError("row_sum: shape must be non-empty");
  return LinearMap(
      std::make_shared<const Node>(Node{Kind::kRowSum, {rows, cols}, {1, cols}, RowSumOp{}}));
}

LinearMap LinearMap::identity(Shape shape) {
  return LinearMap(std::make_shared<const Node>(Node{Kind::kIdentity, shape, shape, IdentityOp{}}));
}

LinearMap LinearMap::negation(Shape shape) {
  return LinearMap(std::make_shared<const Node>(Node{Kind::kNegation, shape, shape, NegationOp{}}));
}

LinearMap LinearMap::scale(double c, LinearMap inner) {
  if (!std::isfinite(c)) throw ParameterError("scale: factor must be finite");
  const Shape in = inner.input_shape(), out = inner.output_shape();
  return LinearMap(
      std::make_shared<const Node>(Node{Kind::kScale, in, out, ScaleOp{c, std::move(inner)}}));
}

LinearMap LinearMap::vstack(std::vector<LinearMap> parts) {
  if (parts.empty()) throw ParameterError("vstack: needs at least one part");
  const Shape in = parts.front().input_shape();
  const Index cols = parts.front().output_shape().cols;
  std::vector<Index> offsets;
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.input_shape() != in)
      throw DimensionError("vstack: input shapes differ, " + to_string(in) + " vs " +
                           to_string(p.input_shape()));
    if (p.output_shape().cols != cols)
      throw DimensionError("vstack: output column counts differ");
    offsets.push_back(rows);
    rows += p.output_shape().rows;
  }
  return LinearMap(std::make_shared<const Node>(
      Node{Kind::kVStack, in, {rows, cols}, VStackOp{std::move(parts), std::move(offsets)}}));
}

LinearMap LinearMap::zero(Shape input, Shape output) {
  return LinearMap(std::make_shared<const Node>(Node{Kind::kZero, input, output, ZeroOp{}}));
}

LinearMap::Kind LinearMap::kind() const { return node_->kind; }
Shape LinearMap::input_shape() const { return node_->in; }
Shape LinearMap::output_shape() const { return node_->out; }

Matrix LinearMap::apply(const Matrix& x) const {
  require_shape(x, node_->in, "LinearMap::apply");
  const Shape out = node_->out;
  return std::visit(
      [&](const auto& op) -> Matrix {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, DenseOp> || std::is_same_v<T, LeftMultiplyOp>) {
          return op.m * x;
        } else if constexpr (std::is_same_v<T, RowSumOp>) {
          return x.colwise().sum();
        } else if constexpr (std::is_same_v<T, IdentityOp>) {
          return x;
        } else if constexpr (std::is_same_v<T, NegationOp>) {
          return -x;
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return op.c * op.inner.apply(x);
        } else if constexpr (std::is_same_v<T, VStackOp>) {
          Matrix y(out.rows, out.cols);
          for (std::size_t i = 0; i < op.parts.size(); ++i) {
            const Index r = op.parts[i].output_shape().rows;
            y.middleRows(op.offsets[i], r) = op.parts[i].apply(x);
          }
          return y;
        } else {
          return Matrix::Zero(out.rows, out.cols);
        }
      },
      node_->op);
}

Matrix LinearMap::adjoint(const Matrix& y) const {
  require_shape(y, node_->out, "LinearMap::adjoint");
  const Shape in = node_->in;
  return std::visit(
      [&](const auto& op) -> Matrix {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, DenseOp> || std::is_same_v<T, LeftMultiplyOp>) {
          return op.m.transpose() * y;
        } else if constexpr (std::is_same_v<T, RowSumOp>) {
          return y.replicate(in.rows, 1);
        } else if constexpr (std::is_same_v<T, IdentityOp>) {
          return y;
        } else if constexpr (std::is_same_v<T, NegationOp>) {
          return -y;
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return op.c * op.inner.adjoint(y);
        } else if constexpr (std::is_same_v<T, VStackOp>) {
          Matrix x = Matrix::Zero(in.rows, in.cols);
          for (std::size_t i = 0; i < op.parts.size(); ++i) {
            const Index r = op.parts[i].output_shape().rows;
            x += op.parts[i].adjoint(y.middleRows(op.offsets[i], r));
          }
          return x;
        } else {
          return Matrix::Zero(in.rows, in.cols);
        }
      },
      node_->op);
}

Matrix LinearMap::to_dense() const {
  const Shape in = node_->in, out = node_->out;
  Matrix dense(out.size(), in.size());
  Matrix e = Matrix::Zero(in.rows, in.cols);
  for (Index j = 0; j < in.size(); ++j) {
    e.data()[j] = 1.0;
    dense.col(j) = apply(e).reshaped();
    e.data()[j] = 0.0;
  }
  return dense;
}

Matrix apply(const LinearMap& map, const Matrix& x) { return map.apply(x); }
Matrix adjoint_apply(const LinearMap& map, const Matrix& y) { return map.adjoint(y); }

BlockMap::BlockMap(std::vector<LinearMap> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ParameterError("BlockMap: needs at least one block");
  output_ = parts_.front().output_shape();
  for (const auto& p : parts_) {
    if (p.output_shape() != output_)
      throw DimensionError("BlockMap: output shapes differ, " + to_string(output_) + " vs " +
                           to_string(p.output_shape()));
  }
}

std::vector<Shape> BlockMap::input_shapes() const {
  std::vector<Shape> s;
  s.reserve(parts_.size());
  for (const auto& p : parts_) s.push_back(p.input_shape());
  return s;
}

Matrix BlockMap::apply(const BlockPoint& x) const {
  if (x.size() != parts_.size())
    throw DimensionError("BlockMap::apply: expected " + std::to_string(parts_.size()) +
                         " blocks, got " + std::to_string(x.size()));
  Matrix y = parts_[0].apply(x[0]);
  for (std::size_t i = 1; i < parts_.size(); ++i) y += parts_[i].apply(x[i]);
  return y;
}

BlockPoint BlockMap::adjoint(const Matrix& y) const {
  BlockPoint x;
  x.reserve(parts_.size());
  for (const auto& p : parts_) x.push_back(p.adjoint(y));
  return x;
}

NormEstimate op_norm_sq(const BlockMap& map, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ParameterError("op_norm_sq: tol must be > 0");
  if (max_iter < 1) throw ParameterError("op_norm_sq: max_iter must be >= 1");

  Rng rng(kPowerIterationSeed);
  BlockPoint v;
  for (const auto& s : map.input_shapes()) v.push_back(rng.normal_matrix(s.rows, s.cols));
  double nv = norm(v);
  for (auto& b : v) b /= nv;

  NormEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix av = map.apply(v);
    const double value = av.squaredNorm();  // Rayleigh quotient of A^T A at unit v
    est.value = value;
    est.iterations = it;
    if (value == 0.0) {
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(value - prev) <= tol * value) {
      est.converged = true;
      return est;
    }
    prev = value;
    v = map.adjoint(av);
    nv = norm(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) break;
    for (auto& b : v) b /= nv;
  }
  return est;
}

NormEstimate op_norm_sq(const LinearMap& map, double tol, int max_iter) {
  return op_norm_sq(BlockMap({map}), tol, max_iter);
}

}  // namespace fastalm
