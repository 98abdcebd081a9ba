#pragma once

namespace cnprop {

enum class Side { Left, Right };

/// Chord linearization k = g1 (E - V) + g2 of the dispersion k = +-sqrt(2E)
/// through the interpolation energies alpha1 and alpha2 (m = hbar = 1).
/// Right-boundary coefficients carry the + branch, left-boundary the - branch.
struct AbcCoefficients {
  double g1 = 0.0;
  double g2 = 0.0;
  Side side = Side::Right;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  /// g1 E + g2, the linearized wavenumber at kinetic energy E.
  double wavenumber(double energy) const noexcept { return g1 * energy + g2; }
};

/// Throws InvalidArgument for non-positive energies and DegenerateEnergies
/// when alpha1 == alpha2.
AbcCoefficients abc_coefficients(double alpha1, double alpha2, Side side);

/// Drive frequency (p0 - g2) / g1, for which the linearized dispersion yields
/// wavenumber p0 in a zero potential.
double source_omega(double p0, const AbcCoefficients& g);

}  // namespace cnprop
