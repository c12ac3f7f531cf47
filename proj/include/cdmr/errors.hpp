#ifndef CDMR_ERRORS_HPP
#define CDMR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cdmr {

enum class ErrorCode {
  InvalidArgument,
  CoincidentGenerators,
  ZeroMass,
  Infeasible,
  NumericallyIllConditioned,
  CoincidentNeighbors,
  NegativeCost,
  SingularJacobian,
  SchemaError,
  ValidationError,
  IoError,
  VerificationFailed,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace cdmr

#endif  // CDMR_ERRORS_HPP
