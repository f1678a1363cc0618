#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fastalm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Row/column extent of a matrix-valued operand. Vectors are (n, 1).
struct Shape {
  Index rows = 0;
  Index cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
  Index size() const { return rows * cols; }
};

inline Shape shape_of(const Matrix& m) { return {m.rows(), m.cols()}; }

std::string to_string(const Shape& s);

/// Throws DimensionError naming `what`, the expected and the actual shape.
void require_shape(const Matrix& m, const Shape& expected, const char* what);

/// Ordered collection of block variables x = [x_1; ...; x_n].
using BlockPoint = std::vector<Matrix>;

BlockPoint zeros_like(const BlockPoint& x);
BlockPoint zeros(const std::vector<Shape>& shapes);

/// Frobenius inner product summed over blocks.
double dot(const BlockPoint& a, const BlockPoint& b);
double squared_norm(const BlockPoint& x);
double norm(const BlockPoint& x);
double distance(const BlockPoint& a, const BlockPoint& b);
/// Largest Frobenius norm among the blocks.
double max_block_norm(const BlockPoint& x);
bool all_finite(const BlockPoint& x);

/// a*x + b*y blockwise, evaluated in that order for every entry.
BlockPoint combine(double a, const BlockPoint& x, double b, const BlockPoint& y);

}  // namespace fastalm
