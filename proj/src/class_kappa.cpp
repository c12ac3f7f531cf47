#include "cdmr/class_kappa.hpp"

#include <cmath>

namespace cdmr {

ClassKappa ClassKappa::linear(double c) {
  if (c <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "class-K gain must be > 0");
  ClassKappa k;
  k.kind_ = Kind::Linear;
  k.c_ = c;
  return k;
}

ClassKappa ClassKappa::signed_power(double c, double gamma) {
  if (c <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "class-K gain must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw_error(ErrorCode::InvalidArgument,
                "signed-power exponent must lie in (0,1)");
  ClassKappa k;
  k.kind_ = Kind::SignedPower;
  k.c_ = c;
  k.gamma_ = gamma;
  return k;
}

double ClassKappa::operator()(double x) const {
  switch (kind_) {
    case Kind::Linear:
      return c_ * x;
    case Kind::SignedPower:
      if (x == 0.0) return 0.0;
      return c_ * (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), gamma_);
  }
  return 0.0;
}

}  // namespace cdmr
