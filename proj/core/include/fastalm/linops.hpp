#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fastalm/types.hpp"

namespace fastalm {

/// Bounded linear map between matrix spaces, with its adjoint.
///
/// Values are immutable handles to a shared node; copying is cheap and
/// instances may be shared freely between threads.
class LinearMap {
 public:
  enum class Kind { kDense, kLeftMultiply, kRowSum, kIdentity, kNegation, kScale, kVStack, kZero };

  /// x (cols x 1) -> M x.
  static LinearMap dense(Matrix m);
  /// X (M.cols x cols) -> M X.
  static LinearMap left_multiply(Matrix m, Index cols);
  /// X (rows x cols) -> 1^T X, a (1 x cols) row of column sums.
  static LinearMap row_sum(Index rows, Index cols);
  static LinearMap identity(Shape shape);
  static LinearMap identity(Index n) { return identity(Shape{n, 1}); }
  static LinearMap negation(Shape shape);
  /// c * inner(x).
  static LinearMap scale(double c, LinearMap inner);
  /// Stacks the outputs of maps sharing one input shape on top of each other.
  /// All parts must produce the same number of columns.
  static LinearMap vstack(std::vector<LinearMap> parts);
  static LinearMap zero(Shape input, Shape output);

  Kind kind() const;
  Shape input_shape() const;
  Shape output_shape() const;

  Matrix apply(const Matrix& x) const;
  Matrix adjoint(const Matrix& y) const;

  /// Explicit matrix of the map on column-major vectorizations. Test/oracle use.
  Matrix to_dense() const;

 private:
  struct Node;
  explicit LinearMap(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Matrix apply(const LinearMap& map, const Matrix& x);
Matrix adjoint_apply(const LinearMap& map, const Matrix& y);

/// Horizontal concatenation [A_1, ..., A_n] acting on a BlockPoint:
/// x |-> sum_i A_i(x_i). All parts share one output shape.
class BlockMap {
 public:
  BlockMap() = default;
  explicit BlockMap(std::vector<LinearMap> parts);

  std::size_t size() const { return parts_.size(); }
  const LinearMap& part(std::size_t i) const { return parts_[i]; }
  const std::vector<LinearMap>& parts() const { return parts_; }
  Shape output_shape() const { return output_; }
  std::vector<Shape> input_shapes() const;

  /// Sums block contributions in increasing block order.
  Matrix apply(const BlockPoint& x) const;
  BlockPoint adjoint(const Matrix& y) const;

 private:
  std::vector<LinearMap> parts_;
  Shape output_;
};

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline constexpr double kDefaultNormTol = 1e-10;
inline constexpr int kDefaultNormMaxIter = 1000;
/// Seed of the start vector used by every power iteration in the library.
inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed'0f'a1'0eULL;

/// Largest eigenvalue of A^T A (squared spectral norm) by power iteration.
/// Stops when the relative change between successive estimates is <= tol;
/// otherwise returns the last estimate with converged = false.
NormEstimate op_norm_sq(const LinearMap& map, double tol = kDefaultNormTol,
                        int max_iter = kDefaultNormMaxIter);
NormEstimate op_norm_sq(const BlockMap& map, double tol = kDefaultNormTol,
                        int max_iter = kDefaultNormMaxIter);

}  // namespace fastalm
