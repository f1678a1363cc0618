#pragma once

#include <vector>

#include "fastalm/functions.hpp"
#include "fastalm/linops.hpp"
#include "fastalm/types.hpp"

namespace fastalm {

/// One separable term g_i(x_i) + h_i(x_i) and its constraint operator A_i.
struct Block {
  SmoothFn g;
  ProxFn h;
  LinearMap a;
};

/// min sum_i g_i(x_i) + h_i(x_i)  s.t.  sum_i A_i(x_i) = b.
///
/// Construction validates shapes and caches L_i, ||A_i||^2 and the squared
/// norm of the concatenated operator [A_1, ..., A_n]. Nothing is re-estimated
/// afterwards.
class BlockProblem {
 public:
  BlockProblem(std::vector<Block> blocks, Matrix b);

  std::size_t size() const { return blocks_.size(); }
  const Block& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Matrix& b() const { return b_; }
  const BlockMap& map() const { return map_; }
  std::vector<Shape> shapes() const { return map_.input_shapes(); }

  double lipschitz(std::size_t i) const { return lipschitz_[i]; }
  double max_lipschitz() const;
  double a_norm_sq(std::size_t i) const { return a_norm_sq_[i]; }
  /// ||[A_1, ..., A_n]||^2.
  double total_a_norm_sq() const { return total_a_norm_sq_; }

  double block_objective(std::size_t i, const Matrix& xi) const;
  double objective(const BlockPoint& x) const;
  /// A(x) - b.
  Matrix residual(const BlockPoint& x) const;

  void check_point(const BlockPoint& x, const char* what) const;

 private:
  std::vector<Block> blocks_;
  Matrix b_;
  BlockMap map_;
  std::vector<double> lipschitz_;
  std::vector<double> a_norm_sq_;
  double total_a_norm_sq_ = 0.0;
};

}  // namespace fastalm
