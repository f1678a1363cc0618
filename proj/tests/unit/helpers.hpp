#pragma once

#include <cmath>
#include <cstdint>

#include "fastalm/rng.hpp"
#include "fastalm/types.hpp"

namespace fastalm::testing {

inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

inline double rel_diff(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace fastalm::testing
