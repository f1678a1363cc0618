#include "fastalm/schedule.hpp"

#include <cmath>

#include "fastalm/error.hpp"

namespace fastalm {

double theta_next(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta_next: theta must lie in (0, 1]");
  const double t2 = theta * theta;
  return 2.0 * t2 / (t2 + std::sqrt(t2 * t2 + 4.0 * t2));
}

double beta_fast_palm(double theta) {
  if (!(theta > 0.0)) throw ParameterError("beta_fast_palm: theta must be > 0");
  return 1.0 / theta;
}

void ThetaState::advance() {
  theta = theta_next(theta);
  inv_theta_sum += 1.0 / theta;
  ++k;
}

}  // namespace fastalm
