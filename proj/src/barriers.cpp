#include "cdmr/barriers.hpp"

#include <cmath>

namespace cdmr {

ConstraintRow cbf_row(const BarrierSpec& spec) {
  ConstraintRow row;
  row.a_u = spec.grad_h_u;
  row.a_delta = spec.slackable ? 1.0 : 0.0;
  row.b = -spec.alpha(spec.h) - spec.drift;
  row.label = spec.label;
  return row;
}

BarrierSpec task_barrier(double j_value, const Eigen::VectorXd& grad_j,
                         const ClassKappa& alpha) {
  if (j_value < 0.0)
    throw_error(ErrorCode::NegativeCost, "task cost must be nonnegative");
  BarrierSpec spec;
  spec.h = -j_value;
  spec.grad_h_u = -grad_j;
  spec.drift = 0.0;
  spec.alpha = alpha;
  spec.slackable = true;
  spec.label = RowLabel::Task;
  return spec;
}

double settling_time_bound(double v0, double c, double gamma) {
  if (v0 < 0.0)
    throw_error(ErrorCode::InvalidArgument, "v0 must be >= 0");
  if (c <= 0.0 || !(gamma > 0.0 && gamma < 1.0))
    throw_error(ErrorCode::InvalidArgument, "need c > 0 and gamma in (0,1)");
  if (v0 == 0.0) return 0.0;
  return std::pow(v0, 1.0 - gamma) / (c * (1.0 - gamma));
}

}  // namespace cdmr
