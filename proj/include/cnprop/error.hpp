#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnprop {

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  SingularMatrix,
  NotSymmetricOffdiag,
  ShapeMismatch,
  DensePathCapExceeded,
  InvalidAbcCoefficients,
  DegenerateEnergies,
  NonpositiveOmega,
  EmptyRegion,
  NotSettled,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cnprop
