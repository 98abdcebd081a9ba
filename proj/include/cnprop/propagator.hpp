#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "cnprop/abc.hpp"
#include "cnprop/lattice.hpp"
#include "cnprop/physics.hpp"
#include "cnprop/tridiag.hpp"

namespace cnprop {

enum class BoundaryMode { Dirichlet, Abc };

/// How a step applies D2^{-1}: the dense closed-form product E = D2^{-1} D1
/// (O(N^2) per step) or one tridiagonal solve (O(N) per step).
enum class Strategy { DenseInverse, TridiagonalSolve };

/// Crank-Nicolson coefficients:
///   alpha = i dt / (4 dx^2), beta_j = (i dt / 2)(1 / dx^2 + V_j),
///   gamma_j = 1 - beta_j, xi_j = 1 + beta_j.
struct SchemeParameters {
  Complex alpha;
  ComplexVector beta;
  ComplexVector gamma;
  ComplexVector xi;

  static SchemeParameters compute(const SpatialGrid& grid, std::span<const double> potential,
                                  double dt);
};

/// Coefficients of one absorbing boundary row. eta1 and eta2 multiply the
/// new-time values in D2; eta3 (neighbor) and eta4 (boundary site) multiply the
/// old-time values in D1.
struct AbcBoundaryRow {
  Complex eta1;
  Complex eta2;
  Complex eta3;
  Complex eta4;
};

/// Boundary row for the given side. v_boundary is the potential at the
/// boundary site. Throws InvalidAbcCoefficients when g1 == 0 or g belongs to
/// the other side.
AbcBoundaryRow abc_boundary_row(Side side, double dt, double dx, double v_boundary,
                                const AbcCoefficients& g);

/// One-step propagator psi^{n+1} = D2^{-1} (D1 psi^n - b^n). Immutable once built.
class EvolutionOperator {
 public:
  BoundaryMode mode() const noexcept { return mode_; }
  Strategy strategy() const noexcept { return strategy_; }
  const SpatialGrid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  const SchemeParameters& parameters() const noexcept { return params_; }
  const TridiagonalMatrix& d1() const noexcept { return d1_; }
  const TridiagonalMatrix& d2() const noexcept { return d2_; }
  const ThomasFactorization& factorization() const noexcept { return factorization_; }
  /// E = D2^{-1} D1, present for Strategy::DenseInverse.
  const std::optional<DenseMatrix>& product() const noexcept { return product_; }
  /// D2^{-1}, present for Strategy::DenseInverse.
  const std::optional<DenseMatrix>& d2_inverse() const noexcept { return d2_inverse_; }
  /// Absorbing rows (left, right); empty in Dirichlet mode.
  const std::optional<AbcBoundaryRow>& left_row() const noexcept { return left_row_; }
  const std::optional<AbcBoundaryRow>& right_row() const noexcept { return right_row_; }
  /// False when the potential differs between a boundary site and its neighbor.
  bool boundary_potential_uniform() const noexcept { return boundary_uniform_; }

 private:
  EvolutionOperator(SpatialGrid grid, double dt) : grid_(grid), dt_(dt) {}

  friend EvolutionOperator build_dirichlet(const SpatialGrid&, std::span<const double>, double);
  friend EvolutionOperator build_abc(const SpatialGrid&, std::span<const double>, double,
                                     const AbcCoefficients&, const AbcCoefficients&);
  friend EvolutionOperator build_dense_product(EvolutionOperator);
  friend EvolutionOperator with_strategy(EvolutionOperator, Strategy);

  BoundaryMode mode_ = BoundaryMode::Dirichlet;
  Strategy strategy_ = Strategy::TridiagonalSolve;
  SpatialGrid grid_;
  double dt_;
  SchemeParameters params_;
  TridiagonalMatrix d1_;
  TridiagonalMatrix d2_;
  ThomasFactorization factorization_;
  std::optional<DenseMatrix> product_;
  std::optional<DenseMatrix> d2_inverse_;
  std::optional<AbcBoundaryRow> left_row_;
  std::optional<AbcBoundaryRow> right_row_;
  bool boundary_uniform_ = true;
};

/// Fixed-end (psi = 0 outside the grid) propagator. dt may be negative to step
/// backwards in time.
EvolutionOperator build_dirichlet(const SpatialGrid& grid, std::span<const double> potential,
                                  double dt);

/// Absorbing-boundary propagator; interior rows match build_dirichlet.
EvolutionOperator build_abc(const SpatialGrid& grid, std::span<const double> potential, double dt,
                            const AbcCoefficients& left, const AbcCoefficients& right);

/// Switches op to Strategy::DenseInverse, materializing D2^{-1} and E from the
/// closed-form inverse. Throws DensePathCapExceeded above kDenseCap sites.
EvolutionOperator build_dense_product(EvolutionOperator op);

/// Returns op configured for the requested strategy.
EvolutionOperator with_strategy(EvolutionOperator op, Strategy strategy);

/// b^n: zero except at the source site, where
///   b = (i dt / 2)(1 / dx)[S(t_n) e^{-i omega t_n} + S(t_{n+1}) e^{-i omega t_{n+1}}].
ComplexVector source_vector(const SourceSpec& source, std::size_t n, double dt, double dx,
                            double t0, std::size_t n_sites);

/// Single entry of source_vector at the source site.
Complex source_weight(const SourceSpec& source, std::size_t n, double dt, double dx, double t0);

/// Advances psi from t_n = t0 + n dt to t_{n+1}.
WaveFunction step(const EvolutionOperator& op, const WaveFunction& psi,
                  const SourceSpec* source = nullptr, std::size_t n = 0, double t0 = 0.0);

/// Allocation-free repeated stepping for one trajectory.
class Stepper {
 public:
  Stepper(const EvolutionOperator& op, std::optional<SourceSpec> source = std::nullopt,
          double t0 = 0.0);

  /// In-place psi^n -> psi^{n+1}.
  void advance(std::span<Complex> psi, std::size_t n);

  const EvolutionOperator& op() const noexcept { return *op_; }

 private:
  const EvolutionOperator* op_;
  std::optional<SourceSpec> source_;
  double t0_;
  ComplexVector work_;
};

}  // namespace cnprop
