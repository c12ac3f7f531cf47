#ifndef CDMR_CLASS_KAPPA_HPP
#define CDMR_CLASS_KAPPA_HPP

#include "cdmr/errors.hpp"

namespace cdmr {

/// Extended class-K function: strictly increasing on all of R, zero at
/// zero. Two kinds are shipped: linear c*x and the odd signed power
/// c*sign(x)*|x|^gamma with gamma in (0,1). The cube root of the combined
/// problems is signed_power(1, 1/3). Signed powers are superadditive for
/// negative arguments, as the decentralized constraint summation needs.
class ClassKappa {
 public:
  enum class Kind { Linear, SignedPower };

  ClassKappa() = default;  // identity (linear, c = 1)

  static ClassKappa linear(double c);
  static ClassKappa signed_power(double c, double gamma);
  static ClassKappa cube_root() { return signed_power(1.0, 1.0 / 3.0); }

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double gain() const { return c_; }
  double exponent() const { return gamma_; }
  bool finite_time() const { return kind_ == Kind::SignedPower; }

 private:
  Kind kind_ = Kind::Linear;
  double c_ = 1.0;
  double gamma_ = 1.0;
};

}  // namespace cdmr

#endif  // CDMR_CLASS_KAPPA_HPP
