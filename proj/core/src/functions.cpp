#include "fastalm/functions.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "fastalm/error.hpp"
#include "fastalm/linops.hpp"

namespace fastalm {

namespace {

const Matrix& empty_matrix() {
  static const Matrix m;
  return m;
}

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& a, bool vectors) {
  const unsigned opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Matrix> svd(a, opts);
  if (svd.info() != Eigen::Success) throw NumericError("SVD failed to converge");
  return svd;
}

}  // namespace

SmoothFn SmoothFn::quadratic(Matrix c, Matrix d, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("quadratic: alpha must be > 0");
  if (c.rows() != d.rows())
    throw DimensionError("quadratic: C has " + std::to_string(c.rows()) + " rows but D has " +
                         std::to_string(d.rows()));
  const double norm_sq = op_norm_sq(LinearMap::dense(c)).value;
  SmoothFn g;
  g.data_ = std::make_shared<const Data>(Data{std::move(c), std::move(d), alpha, alpha * norm_sq});
  return g;
}

Shape SmoothFn::domain_shape() const {
  if (!data_) return {};
  return {data_->c.cols(), data_->d.cols()};
}

const Matrix& SmoothFn::c() const { return data_ ? data_->c : empty_matrix(); }
const Matrix& SmoothFn::d() const { return data_ ? data_->d : empty_matrix(); }

double SmoothFn::value(const Matrix& x) const {
  if (!data_) return 0.0;
  require_shape(x, domain_shape(), "SmoothFn::value");
  return 0.5 * data_->alpha * (data_->c * x - data_->d).squaredNorm();
}

Matrix SmoothFn::grad(const Matrix& x) const {
  if (!data_) return Matrix::Zero(x.rows(), x.cols());
  require_shape(x, domain_shape(), "SmoothFn::grad");
  return data_->alpha * (data_->c.transpose() * (data_->c * x - data_->d));
}

ProxFn::ProxFn(Kind kind, double weight) : kind_(kind), weight_(weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw ParameterError("prox function weight must be finite and >= 0");
}

Matrix soft_threshold(const Matrix& a, double t) {
  return a.unaryExpr([t](double v) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
  });
}

double ProxFn::value(const Matrix& x) const {
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kL1:
      return weight_ * x.cwiseAbs().sum();
    case Kind::kNuclear:
      if (x.size() == 0) return 0.0;
      return weight_ * thin_svd(x, false).singularValues().sum();
    case Kind::kL21:
      return weight_ * x.colwise().norm().sum();
  }
  return 0.0;
}

Matrix ProxFn::prox(const Matrix& a, double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("prox: tau must be > 0");
  const double t = tau * weight_;
  switch (kind_) {
    case Kind::kZero:
      return a;
    case Kind::kL1:
      return soft_threshold(a, t);
    case Kind::kNuclear: {
      if (a.size() == 0) return a;
      const auto svd = thin_svd(a, true);
      const Vector s = (svd.singularValues().array() - t).max(0.0).matrix();
      Index rank = 0;
      while (rank < s.size() && s(rank) > 0.0) ++rank;
      if (rank == 0) return Matrix::Zero(a.rows(), a.cols());
      return svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal() *
             svd.matrixV().leftCols(rank).transpose();
    }
    case Kind::kL21: {
      Matrix out(a.rows(), a.cols());
      for (Index j = 0; j < a.cols(); ++j) {
        const double n = a.col(j).norm();
        // Zero columns stay zero.
        if (n > t) {
          out.col(j) = ((n - t) / n) * a.col(j);
        } else {
          out.col(j).setZero();
        }
      }
      return out;
    }
  }
  return a;
}

Matrix grad(const SmoothFn& g, const Matrix& x) { return g.grad(x); }
Matrix prox(const ProxFn& h, const Matrix& a, double tau) { return h.prox(a, tau); }
double value(const SmoothFn& g, const Matrix& x) { return g.value(x); }
double value(const ProxFn& h, const Matrix& x) { return h.value(x); }

}  // namespace fastalm
