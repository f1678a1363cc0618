#pragma once

#include <cstdint>

namespace fastalm {

/// Next interpolation weight: the positive root t of (1 - t) / t^2 = 1 / theta^2.
///
/// Evaluated as 2 theta^2 / (theta^2 + sqrt(theta^4 + 4 theta^2)), which avoids
/// the cancellation in (-theta^2 + sqrt(theta^4 + 4 theta^2)) / 2 for small theta.
/// Throws ParameterError unless 0 < theta <= 1.
double theta_next(double theta);

/// Penalty of the accelerated single-block method: 1 / theta.
double beta_fast_palm(double theta);

/// theta^(k) together with the running sum of 1/theta^(j), j = 0..k.
///
/// Starting from theta^(0) = 1 the sum equals 1/(theta^(k))^2 exactly in
/// exact arithmetic; the stored value lets callers check that identity.
struct ThetaState {
  std::int64_t k = 0;
  double theta = 1.0;
  double inv_theta_sum = 1.0;

  void advance();
};

}  // namespace fastalm
