#include "cnprop/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cnprop/error.hpp"

namespace cnprop {

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n_sites)
    : x_min_(x_min), x_max_(x_max), n_sites_(n_sites) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw Error(ErrorCode::InvalidArgument, "grid requires finite x_max > x_min");
  }
  if (n_sites == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid requires at least one site");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n_sites);
}

double SpatialGrid::position(std::size_t j) const {
  if (j >= n_sites_) {
    throw Error(ErrorCode::IndexOutOfRange,
                "site index " + std::to_string(j) + " outside grid of " +
                    std::to_string(n_sites_) + " sites");
  }
  return x_min_ + (static_cast<double>(j) + 0.5) * dx_;
}

std::size_t SpatialGrid::nearest_site(double x) const noexcept {
  const double cell = std::floor((x - x_min_) / dx_);
  if (!(cell > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(cell), n_sites_ - 1);
}

RealVector SpatialGrid::positions() const {
  RealVector xs(n_sites_);
  for (std::size_t j = 0; j < n_sites_; ++j) xs[j] = position(j);
  return xs;
}

TimeGrid::TimeGrid(double t0, double dt, std::size_t n_steps)
    : t0(t0), dt(dt), n_steps(n_steps) {
  if (!std::isfinite(t0) || !std::isfinite(dt) || !(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time grid requires finite dt > 0");
  }
}

WaveFunction::WaveFunction(SpatialGrid grid)
    : grid_(grid), amplitudes_(grid.n_sites()) {}

WaveFunction::WaveFunction(SpatialGrid grid, ComplexVector amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.n_sites()) {
    throw Error(ErrorCode::ShapeMismatch,
                "wavefunction has " + std::to_string(amplitudes_.size()) +
                    " amplitudes for a grid of " + std::to_string(grid_.n_sites()));
  }
}

bool WaveFunction::all_finite() const noexcept {
  return std::all_of(amplitudes_.begin(), amplitudes_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double norm(const WaveFunction& psi) {
  double sum = 0.0;
  for (Complex z : psi.amplitudes()) sum += std::norm(z);
  return std::sqrt(sum * psi.grid().dx());
}

double probability_in_interval(const WaveFunction& psi, double a, double b) {
  if (!(a < b)) {
    throw Error(ErrorCode::InvalidArgument, "probability interval requires a < b");
  }
  const auto& grid = psi.grid();
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.n_sites(); ++j) {
    const double x = grid.position(j);
    if (x >= a && x <= b) sum += std::norm(psi[j]);
  }
  return sum * grid.dx();
}

}  // namespace cnprop
