#pragma once

#include <memory>

#include "fastalm/types.hpp"

namespace fastalm {

/// Smooth convex term g with Lipschitz-continuous gradient.
///
/// Quadratic(C, D, alpha) is g(X) = alpha/2 ||C X - D||_F^2, whose gradient
/// alpha C^T (C X - D) is Lipschitz with constant alpha ||C||^2. The constant
/// is estimated once, at construction, by power iteration.
class SmoothFn {
 public:
  enum class Kind { kZero, kQuadratic };

  SmoothFn() = default;  // zero
  static SmoothFn zero() { return SmoothFn(); }
  static SmoothFn quadratic(Matrix c, Matrix d, double alpha);

  Kind kind() const { return data_ ? Kind::kQuadratic : Kind::kZero; }
  double lipschitz() const { return data_ ? data_->lipschitz : 0.0; }
  /// Domain shape for a quadratic (C.cols x D.cols); zero accepts any shape.
  Shape domain_shape() const;

  double value(const Matrix& x) const;
  Matrix grad(const Matrix& x) const;

  const Matrix& c() const;
  const Matrix& d() const;
  double alpha() const { return data_ ? data_->alpha : 0.0; }

 private:
  struct Data {
    Matrix c;
    Matrix d;
    double alpha;
    double lipschitz;
  };
  std::shared_ptr<const Data> data_;
};

/// Nonsmooth convex term h with a cheap proximal map.
///
///   L1(w)       w * sum |x_ij|
///   Nuclear(w)  w * sum of singular values
///   L21(w)      w * sum of column Euclidean norms
class ProxFn {
 public:
  enum class Kind { kZero, kL1, kNuclear, kL21 };

  ProxFn() = default;
  static ProxFn zero() { return ProxFn(); }
  static ProxFn l1(double weight) { return ProxFn(Kind::kL1, weight); }
  static ProxFn nuclear(double weight) { return ProxFn(Kind::kNuclear, weight); }
  static ProxFn l21(double weight) { return ProxFn(Kind::kL21, weight); }

  Kind kind() const { return kind_; }
  double weight() const { return weight_; }

  double value(const Matrix& x) const;
  /// argmin_x h(x) + 1/(2 tau) ||x - a||^2. Throws ParameterError for tau <= 0.
  Matrix prox(const Matrix& a, double tau) const;

 private:
  ProxFn(Kind kind, double weight);
  Kind kind_ = Kind::kZero;
  double weight_ = 0.0;
};

Matrix grad(const SmoothFn& g, const Matrix& x);
Matrix prox(const ProxFn& h, const Matrix& a, double tau);
double value(const SmoothFn& g, const Matrix& x);
double value(const ProxFn& h, const Matrix& x);

/// Entrywise soft-threshold sign(a) max(|a| - t, 0).
Matrix soft_threshold(const Matrix& a, double t);

}  // namespace fastalm
