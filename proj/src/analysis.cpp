#include "cnprop/analysis.hpp"

#include <cmath>
#include <string>

#include "cnprop/error.hpp"

namespace cnprop {
namespace {

// sinh(z)/z and sin(z)/z, exact at z = 0.
double sinhc(double z) { return std::abs(z) < 1e-4 ? 1.0 + z * z / 6.0 : std::sinh(z) / z; }
double sinc(double z) { return std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z; }

}  // namespace

Complex analytic_source_solution(double x, double t, Complex s0, double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::NonpositiveOmega, "source frequency must be positive");
  const double k = std::sqrt(2.0 * omega);
  const Complex i{0.0, 1.0};
  return s0 / (i * k) * std::exp(i * (k * std::abs(x) - omega * t));
}

double analytic_barrier_transmission(double e, double v0, double width) {
  if (!(e > 0.0) || !(width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "transmission requires energy > 0 and width > 0");
  }
  // T^{-1} = 1 + v0^2 a^2 f^2 / (2 e), with f = sinhc(kappa a) below the barrier
  // and sinc(k' a) above it.
  const double gap = v0 - e;
  const double f = gap > 0.0 ? sinhc(std::sqrt(2.0 * gap) * width)
                             : sinc(std::sqrt(-2.0 * gap) * width);
  return 1.0 / (1.0 + v0 * v0 * width * width * f * f / (2.0 * e));
}

double steady_state_error(const WaveFunction& psi, Complex s0, double omega, double t,
                          const SteadyStateRegion& region) {
  const auto& grid = psi.grid();
  double diff = 0.0;
  double ref = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < grid.n_sites(); ++j) {
    const double x = grid.position(j);
    if (x < region.a || x > region.b) continue;
    if (std::abs(x - region.source_x) <= region.exclusion) continue;
    const Complex exact = analytic_source_solution(x - region.source_x, t, s0, omega);
    diff += std::norm(psi[j] - exact);
    ref += std::norm(exact);
    ++count;
  }
  if (count == 0 || ref == 0.0) {
    throw Error(ErrorCode::EmptyRegion, "steady-state comparison region contains no sites");
  }
  return std::sqrt(diff / ref);
}

double relative_magnitude_change(const WaveFunction& earlier, const WaveFunction& later,
                                 double a, double b) {
  if (!(earlier.grid() == later.grid())) {
    throw Error(ErrorCode::ShapeMismatch, "snapshots live on different grids");
  }
  const auto& grid = later.grid();
  double diff = 0.0;
  double ref = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < grid.n_sites(); ++j) {
    const double x = grid.position(j);
    if (x < a || x > b) continue;
    const double d = std::abs(later[j]) - std::abs(earlier[j]);
    diff += d * d;
    ref += std::norm(later[j]);
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyRegion, "settling region contains no sites");
  if (ref == 0.0) return diff == 0.0 ? 0.0 : 1.0;
  return std::sqrt(diff / ref);
}

TransmissionEstimate estimate_transmission(const WaveFunction& now, const WaveFunction& earlier,
                                           Complex s0, double omega, double barrier_edge,
                                           double monitor_x, std::size_t settle_steps) {
  if (!(omega > 0.0)) throw Error(ErrorCode::NonpositiveOmega, "source frequency must be positive");
  if (s0 == Complex{}) throw Error(ErrorCode::InvalidArgument, "source amplitude must be nonzero");
  const auto& grid = now.grid();
  const bool right = monitor_x > barrier_edge;
  const double a = right ? barrier_edge : grid.x_min();
  const double b = right ? grid.x_max() : barrier_edge;
  const double change = relative_magnitude_change(earlier, now, a, b);
  if (!(change < kSettleTolerance)) {
    throw Error(ErrorCode::NotSettled, "transmitted wave not settled (relative change " +
                                           std::to_string(change) + ")");
  }
  const double k = std::sqrt(2.0 * omega);
  const double incident = std::norm(s0) / (k * k);
  TransmissionEstimate est;
  est.t_numeric = std::norm(now[grid.nearest_site(monitor_x)]) / incident;
  est.monitor_x = monitor_x;
  est.settle_steps = settle_steps;
  est.overshoot = est.t_numeric > kTransmissionOvershoot;
  return est;
}

}  // namespace cnprop
