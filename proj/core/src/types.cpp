#include "fastalm/types.hpp"

#include <algorithm>
#include <cmath>

#include "fastalm/error.hpp"

namespace fastalm {

std::string to_string(const Shape& s) {
  return "(" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + ")";
}

void require_shape(const Matrix& m, const Shape& expected, const char* what) {
  if (shape_of(m) != expected) {
    throw DimensionError(std::string(what) + ": expected shape " + to_string(expected) +
                         ", got " + to_string(shape_of(m)));
  }
}

BlockPoint zeros_like(const BlockPoint& x) {
  BlockPoint out;
  out.reserve(x.size());
  for (const auto& b : x) out.push_back(Matrix::Zero(b.rows(), b.cols()));
  return out;
}

BlockPoint zeros(const std::vector<Shape>& shapes) {
  BlockPoint out;
  out.reserve(shapes.size());
  for (const auto& s : shapes) out.push_back(Matrix::Zero(s.rows, s.cols));
  return out;
}

double dot(const BlockPoint& a, const BlockPoint& b) {
  if (a.size() != b.size()) throw DimensionError("dot: block counts differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require_shape(b[i], shape_of(a[i]), "dot");
    s += a[i].cwiseProduct(b[i]).sum();
  }
  return s;
}

double squared_norm(const BlockPoint& x) {
  double s = 0.0;
  for (const auto& b : x) s += b.squaredNorm();
  return s;
}

double norm(const BlockPoint& x) { return std::sqrt(squared_norm(x)); }

double distance(const BlockPoint& a, const BlockPoint& b) {
  if (a.size() != b.size()) throw DimensionError("distance: block counts differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(s);
}

double max_block_norm(const BlockPoint& x) {
  double m = 0.0;
  for (const auto& b : x) m = std::max(m, b.norm());
  return m;
}

bool all_finite(const BlockPoint& x) {
  return std::all_of(x.begin(), x.end(), [](const Matrix& b) { return b.allFinite(); });
}

BlockPoint combine(double a, const BlockPoint& x, double b, const BlockPoint& y) {
  if (x.size() != y.size()) throw DimensionError("combine: block counts differ");
  BlockPoint out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(a * x[i] + b * y[i]);
  return out;
}

}  // namespace fastalm
