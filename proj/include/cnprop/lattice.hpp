#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cnprop {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

/// Uniform 1D lattice of N cells covering [x_min, x_max].
///
/// Site j (0-based) sits at the center of its cell, x_min + (j + 1/2) dx, so
/// the box quadrature sum |psi_j|^2 dx integrates the cell-indicator expansion
/// exactly.
class SpatialGrid {
 public:
  SpatialGrid(double x_min, double x_max, std::size_t n_sites);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n_sites() const noexcept { return n_sites_; }
  double dx() const noexcept { return dx_; }

  /// Cell-center position of site j, 0-based. Throws IndexOutOfRange.
  double position(std::size_t j) const;

  /// Index of the site whose cell contains x (clamped to the grid).
  std::size_t nearest_site(double x) const noexcept;

  RealVector positions() const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_sites_;
  double dx_;
};

/// Uniform time axis; t_n = t0 + n dt.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  TimeGrid() = default;
  TimeGrid(double t0, double dt, std::size_t n_steps);

  double time(std::size_t n) const noexcept { return t0 + static_cast<double>(n) * dt; }
};

/// Complex amplitudes psi_j on a spatial grid.
class WaveFunction {
 public:
  explicit WaveFunction(SpatialGrid grid);
  WaveFunction(SpatialGrid grid, ComplexVector amplitudes);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }

  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<Complex> amplitudes() noexcept { return amplitudes_; }

  Complex operator[](std::size_t j) const { return amplitudes_[j]; }
  Complex& operator[](std::size_t j) { return amplitudes_[j]; }

  bool all_finite() const noexcept;

 private:
  SpatialGrid grid_;
  ComplexVector amplitudes_;
};

/// sqrt(sum |psi_j|^2 dx).
double norm(const WaveFunction& psi);

/// Probability mass on sites with a <= x_j <= b.
double probability_in_interval(const WaveFunction& psi, double a, double b);

}  // namespace cnprop
