#include "cnprop/abc.hpp"

#include <cmath>

#include "cnprop/error.hpp"

namespace cnprop {

AbcCoefficients abc_coefficients(double alpha1, double alpha2, Side side) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0) || !std::isfinite(alpha1) || !std::isfinite(alpha2)) {
    throw Error(ErrorCode::InvalidArgument, "interpolation energies must be positive and finite");
  }
  if (alpha1 == alpha2) {
    throw Error(ErrorCode::DegenerateEnergies, "interpolation energies must differ");
  }
  const double k1 = std::sqrt(2.0 * alpha1);
  const double k2 = std::sqrt(2.0 * alpha2);
  const double sign = side == Side::Right ? 1.0 : -1.0;
  AbcCoefficients g;
  g.g1 = sign * (k2 - k1) / (alpha2 - alpha1);
  g.g2 = sign * (alpha2 * k1 - alpha1 * k2) / (alpha2 - alpha1);
  g.side = side;
  g.alpha1 = alpha1;
  g.alpha2 = alpha2;
  return g;
}

double source_omega(double p0, const AbcCoefficients& g) {
  if (g.g1 == 0.0) {
    throw Error(ErrorCode::InvalidAbcCoefficients, "source frequency requires g1 != 0");
  }
  return (p0 - g.g2) / g.g1;
}

}  // namespace cnprop
