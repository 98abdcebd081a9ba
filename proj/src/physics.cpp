#include "cnprop/physics.hpp"

#include <cmath>
#include <numbers>

#include "cnprop/error.hpp"

namespace cnprop {

SampledPacket gaussian_packet(const SpatialGrid& grid, const PacketSpec& spec) {
  if (!(spec.sigma0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "packet width sigma0 must be positive");
  }
  const double s2 = spec.sigma0 * spec.sigma0;
  const double prefactor = std::pow(1.0 / (s2 * std::numbers::pi), 0.25);
  ComplexVector amps(grid.n_sites());
  for (std::size_t j = 0; j < grid.n_sites(); ++j) {
    const double u = grid.position(j) - spec.x0;
    amps[j] = prefactor * std::exp(Complex(-u * u / (2.0 * s2), spec.p0 * u));
  }
  const double clearance = 6.0 * spec.sigma0;
  const bool clear =
      spec.x0 - clearance >= grid.x_min() && spec.x0 + clearance <= grid.x_max();
  return {WaveFunction(grid, std::move(amps)), clear};
}

RealVector sample_potential(const SpatialGrid& grid, const PotentialSpec& spec, double p0) {
  RealVector v(grid.n_sites(), 0.0);
  switch (spec.kind) {
    case PotentialKind::Free:
      return v;
    case PotentialKind::Custom:
      if (!spec.custom) {
        throw Error(ErrorCode::InvalidArgument, "custom potential requires a sample function");
      }
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = spec.custom(grid.position(j));
      return v;
    case PotentialKind::SquareBarrier:
    case PotentialKind::SquareWell:
      break;
  }
  if (!(spec.xb > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "square potential requires half-width xb > 0");
  }
  const double magnitude = spec.height.value_or(0.5 * p0 * p0);
  const double value = spec.kind == PotentialKind::SquareBarrier ? magnitude : -magnitude;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (std::abs(grid.position(j)) < spec.xb) v[j] = value;
  }
  return v;
}

Complex source_amplitude(const SourceSpec& spec, double t) {
  if (!spec.ramp) return spec.s0;
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "ramped source evaluated before t = 0");
  return spec.s0 * -std::expm1(-t / *spec.ramp);
}

}  // namespace cnprop
