#include "cnprop/error.hpp"

namespace cnprop {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotSymmetricOffdiag: return "NotSymmetricOffdiag";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DensePathCapExceeded: return "DensePathCapExceeded";
    case ErrorCode::InvalidAbcCoefficients: return "InvalidAbcCoefficients";
    case ErrorCode::DegenerateEnergies: return "DegenerateEnergies";
    case ErrorCode::NonpositiveOmega: return "NonpositiveOmega";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NotSettled: return "NotSettled";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace cnprop
