#include "fastalm/problem.hpp"

#include <algorithm>
#include <cmath>

#include "fastalm/error.hpp"

namespace fastalm {

namespace {

BlockMap make_map(const std::vector<Block>& blocks) {
  if (blocks.empty()) throw ParameterError("BlockProblem: needs at least one block");
  std::vector<LinearMap> parts;
  parts.reserve(blocks.size());
  for (const auto& blk : blocks) parts.push_back(blk.a);
  return BlockMap(std::move(parts));
}

}  // namespace

BlockProblem::BlockProblem(std::vector<Block> blocks, Matrix b)
    : blocks_(std::move(blocks)), b_(std::move(b)), map_(make_map(blocks_)) {
  require_shape(b_, map_.output_shape(), "BlockProblem rhs");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& blk = blocks_[i];
    if (blk.g.kind() == SmoothFn::Kind::kQuadratic &&
        blk.g.domain_shape() != blk.a.input_shape()) {
      throw DimensionError("BlockProblem: block " + std::to_string(i) + " smooth term acts on " +
                           to_string(blk.g.domain_shape()) + " but A_i takes " +
                           to_string(blk.a.input_shape()));
    }
    const double l = blk.g.lipschitz();
    if (!std::isfinite(l)) throw NumericError("BlockProblem: non-finite Lipschitz constant");
    lipschitz_.push_back(l);
    a_norm_sq_.push_back(op_norm_sq(blk.a).value);
  }
  total_a_norm_sq_ = blocks_.size() == 1 ? a_norm_sq_.front() : op_norm_sq(map_).value;
}

double BlockProblem::max_lipschitz() const {
  return *std::max_element(lipschitz_.begin(), lipschitz_.end());
}

double BlockProblem::block_objective(std::size_t i, const Matrix& xi) const {
  return blocks_[i].g.value(xi) + blocks_[i].h.value(xi);
}

double BlockProblem::objective(const BlockPoint& x) const {
  check_point(x, "objective");
  double f = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) f += block_objective(i, x[i]);
  return f;
}

Matrix BlockProblem::residual(const BlockPoint& x) const {
  check_point(x, "residual");
  return map_.apply(x) - b_;
}

void BlockProblem::check_point(const BlockPoint& x, const char* what) const {
  if (x.size() != blocks_.size())
    throw DimensionError(std::string(what) + ": expected " + std::to_string(blocks_.size()) +
                         " blocks, got " + std::to_string(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) require_shape(x[i], blocks_[i].a.input_shape(), what);
}

}  // namespace fastalm
