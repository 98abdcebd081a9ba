#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "cnprop/lattice.hpp"

namespace cnprop {

/// Gaussian wave packet centered at x0 with mean momentum p0 and width sigma0.
struct PacketSpec {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma0 = 1.0;

  bool operator==(const PacketSpec&) const = default;
};

enum class PotentialKind { Free, SquareBarrier, SquareWell, Custom };

/// Piecewise-constant scattering potential, +-V0 on |x| < xb and zero elsewhere.
/// With no explicit height the magnitude matches the packet energy p0^2 / 2.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Free;
  std::optional<double> height;
  double xb = 0.0;
  /// Sampled at each site position for PotentialKind::Custom.
  std::function<double(double)> custom;
};

/// Point source S(t) exp(-i omega t) at one lattice site, with
/// S(t) = s0 (1 - exp(-t / ramp)) or the constant s0 when ramp is empty.
struct SourceSpec {
  Complex s0{};
  std::optional<double> ramp;
  double omega = 0.0;
  std::size_t site = 0;
};

struct SampledPacket {
  WaveFunction psi;
  /// False when the packet lies closer than 6 sigma0 to either grid edge.
  bool clear_of_boundaries = true;
};

SampledPacket gaussian_packet(const SpatialGrid& grid, const PacketSpec& spec);

RealVector sample_potential(const SpatialGrid& grid, const PotentialSpec& spec, double p0);

/// S(t). Throws InvalidArgument for a ramped source at t < 0.
Complex source_amplitude(const SourceSpec& spec, double t);

}  // namespace cnprop
