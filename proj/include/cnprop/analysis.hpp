#pragma once

#include <cstddef>

#include "cnprop/lattice.hpp"

namespace cnprop {

/// Steady plane waves emitted by a constant point source at the origin in
/// free space: psi(x, t) = s0 / (i k) exp(i k |x|) exp(-i omega t), k = sqrt(2 omega).
/// Throws NonpositiveOmega.
Complex analytic_source_solution(double x, double t, Complex s0, double omega);

/// Transmission probability of a plane wave with energy e through a square
/// barrier of height v0 and the given width. Continuous across e == v0.
double analytic_barrier_transmission(double e, double v0, double width);

/// Sites compared against the analytic source solution: a <= x <= b, skipping
/// |x - source_x| <= exclusion.
struct SteadyStateRegion {
  double a = 0.0;
  double b = 0.0;
  double source_x = 0.0;
  double exclusion = 0.0;
};

/// Relative L2 error of psi (at time t) against the analytic source solution
/// centered on region.source_x. Throws EmptyRegion.
double steady_state_error(const WaveFunction& psi, Complex s0, double omega, double t,
                          const SteadyStateRegion& region);

/// Relative L2 change of |psi| between two snapshots over a <= x <= b.
double relative_magnitude_change(const WaveFunction& earlier, const WaveFunction& later,
                                 double a, double b);

inline constexpr double kSettleTolerance = 1e-3;
inline constexpr double kTransmissionOvershoot = 1.05;

struct TransmissionEstimate {
  double t_numeric = 0.0;
  double monitor_x = 0.0;
  std::size_t settle_steps = 0;
  /// Set when t_numeric exceeds 1.05.
  bool overshoot = false;
};

/// Transmitted intensity |psi(monitor_x)|^2 over the incident intensity
/// (|s0| / k)^2. `earlier` is the state one drive period before `now`; the
/// run counts as settled when |psi| changed by less than kSettleTolerance over
/// the far side of the barrier. Throws NotSettled otherwise.
TransmissionEstimate estimate_transmission(const WaveFunction& now, const WaveFunction& earlier,
                                           Complex s0, double omega, double barrier_edge,
                                           double monitor_x, std::size_t settle_steps);

}  // namespace cnprop
