#include "cnprop/propagator.hpp"

#include <cmath>
#include <string>

#include "cnprop/error.hpp"

namespace cnprop {
namespace {

constexpr Complex kI{0.0, 1.0};

void check_potential(const SpatialGrid& grid, std::span<const double> potential, double dt,
                     std::size_t min_sites) {
  if (potential.size() != grid.n_sites()) {
    throw Error(ErrorCode::ShapeMismatch, "potential has " + std::to_string(potential.size()) +
                                              " samples for " + std::to_string(grid.n_sites()) +
                                              " sites");
  }
  if (grid.n_sites() < min_sites) {
    throw Error(ErrorCode::InvalidArgument,
                "propagator requires at least " + std::to_string(min_sites) + " sites");
  }
  if (!std::isfinite(dt) || dt == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "time step must be finite and nonzero");
  }
  for (double v : potential) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential must be finite");
  }
}

}  // namespace

SchemeParameters SchemeParameters::compute(const SpatialGrid& grid,
                                           std::span<const double> potential, double dt) {
  const double dx2 = grid.dx() * grid.dx();
  SchemeParameters p;
  p.alpha = kI * dt / (4.0 * dx2);
  const std::size_t n = potential.size();
  p.beta.resize(n);
  p.gamma.resize(n);
  p.xi.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.beta[j] = 0.5 * kI * dt * (1.0 / dx2 + potential[j]);
    p.gamma[j] = 1.0 - p.beta[j];
    p.xi[j] = 1.0 + p.beta[j];
  }
  return p;
}

AbcBoundaryRow abc_boundary_row(Side side, double dt, double dx, double v_boundary,
                                const AbcCoefficients& g) {
  if (g.g1 == 0.0 || !std::isfinite(g.g1) || !std::isfinite(g.g2)) {
    throw Error(ErrorCode::InvalidAbcCoefficients, "absorbing boundary requires finite g1 != 0");
  }
  if (g.side != side) {
    throw Error(ErrorCode::InvalidAbcCoefficients,
                "boundary coefficients computed for the opposite side");
  }
  // Outward one-way equation i dpsi/dt = (-i/g1 d/dx + V - g2/g1) psi, with the
  // spatial derivative taken between the boundary site and its neighbor and
  // psi averaged onto the midpoint.
  const double outward = side == Side::Right ? 1.0 : -1.0;
  const Complex time = kI / (2.0 * dt);
  const Complex drift = kI * outward / (g.g1 * dx);
  const double shift = 0.5 * (v_boundary - g.g2 / g.g1);
  AbcBoundaryRow row;
  row.eta1 = time;
  row.eta2 = time;
  row.eta3 = time + drift + shift;
  row.eta4 = time - drift + shift;
  return row;
}

EvolutionOperator build_dirichlet(const SpatialGrid& grid, std::span<const double> potential,
                                  double dt) {
  check_potential(grid, potential, dt, 1);
  EvolutionOperator op(grid, dt);
  op.mode_ = BoundaryMode::Dirichlet;
  op.params_ = SchemeParameters::compute(grid, potential, dt);
  const std::size_t n = grid.n_sites();
  const Complex a = op.params_.alpha;
  op.d1_ = TridiagonalMatrix(op.params_.gamma, ComplexVector(n - 1, a), ComplexVector(n - 1, a));
  op.d2_ = TridiagonalMatrix(op.params_.xi, ComplexVector(n - 1, -a), ComplexVector(n - 1, -a));
  op.factorization_ = ThomasFactorization(op.d2_);
  return op;
}

EvolutionOperator build_abc(const SpatialGrid& grid, std::span<const double> potential, double dt,
                            const AbcCoefficients& left, const AbcCoefficients& right) {
  check_potential(grid, potential, dt, 3);
  const std::size_t n = grid.n_sites();
  const AbcBoundaryRow lrow = abc_boundary_row(Side::Left, dt, grid.dx(), potential[0], left);
  const AbcBoundaryRow rrow =
      abc_boundary_row(Side::Right, dt, grid.dx(), potential[n - 1], right);

  EvolutionOperator op(grid, dt);
  op.mode_ = BoundaryMode::Abc;
  op.params_ = SchemeParameters::compute(grid, potential, dt);
  op.left_row_ = lrow;
  op.right_row_ = rrow;
  op.boundary_uniform_ = potential[0] == potential[1] && potential[n - 1] == potential[n - 2];

  const Complex a = op.params_.alpha;
  ComplexVector d1_diag = op.params_.gamma;
  ComplexVector d1_super(n - 1, a);
  ComplexVector d1_sub(n - 1, a);
  ComplexVector d2_diag = op.params_.xi;
  ComplexVector d2_super(n - 1, -a);
  ComplexVector d2_sub(n - 1, -a);

  // Row 1: (eta4, eta3) in D1, (eta2, eta1) in D2.
  d1_diag[0] = lrow.eta4;
  d1_super[0] = lrow.eta3;
  d2_diag[0] = lrow.eta2;
  d2_super[0] = lrow.eta1;
  // Row N: (eta3, eta4) in D1, (eta1, eta2) in D2.
  d1_sub[n - 2] = rrow.eta3;
  d1_diag[n - 1] = rrow.eta4;
  d2_sub[n - 2] = rrow.eta1;
  d2_diag[n - 1] = rrow.eta2;

  op.d1_ = TridiagonalMatrix(std::move(d1_diag), std::move(d1_super), std::move(d1_sub));
  op.d2_ = TridiagonalMatrix(std::move(d2_diag), std::move(d2_super), std::move(d2_sub));
  op.factorization_ = ThomasFactorization(op.d2_);
  return op;
}

EvolutionOperator build_dense_product(EvolutionOperator op) {
  const std::size_t n = op.grid_.n_sites();
  if (n > kDenseCap) {
    throw Error(ErrorCode::DensePathCapExceeded,
                "dense strategy requested for N = " + std::to_string(n) + " (cap " +
                    std::to_string(kDenseCap) + ")");
  }
  DenseMatrix d = op.mode_ == BoundaryMode::Dirichlet ? symmetric_inverse(op.d2_)
                                                      : abc_inverse(op.d2_);
  DenseMatrix e(n);
  if (op.mode_ == BoundaryMode::Dirichlet) {
    // E = 2 D2^{-1} - 1
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) e(i, j) = 2.0 * d(i, j) - (i == j ? 1.0 : 0.0);
    }
  } else {
    // Column j of E combines the (at most three) nonzero entries of column j of D1.
    const auto& d1 = op.d1_;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Complex acc = d(i, j) * d1.diag[j];
        if (j > 0) acc += d(i, j - 1) * d1.super[j - 1];
        if (j + 1 < n) acc += d(i, j + 1) * d1.sub[j];
        e(i, j) = acc;
      }
    }
  }
  op.d2_inverse_ = std::move(d);
  op.product_ = std::move(e);
  op.strategy_ = Strategy::DenseInverse;
  return op;
}

EvolutionOperator with_strategy(EvolutionOperator op, Strategy strategy) {
  if (strategy == Strategy::DenseInverse) {
    if (op.product_) return op;
    return build_dense_product(std::move(op));
  }
  op.product_.reset();
  op.d2_inverse_.reset();
  op.strategy_ = Strategy::TridiagonalSolve;
  return op;
}

Complex source_weight(const SourceSpec& source, std::size_t n, double dt, double dx, double t0) {
  const double tn = t0 + static_cast<double>(n) * dt;
  const double tn1 = t0 + static_cast<double>(n + 1) * dt;
  const Complex sn = source_amplitude(source, tn) * std::exp(-kI * source.omega * tn);
  const Complex sn1 = source_amplitude(source, tn1) * std::exp(-kI * source.omega * tn1);
  return 0.5 * kI * dt / dx * (sn + sn1);
}

ComplexVector source_vector(const SourceSpec& source, std::size_t n, double dt, double dx,
                            double t0, std::size_t n_sites) {
  if (source.site >= n_sites) {
    throw Error(ErrorCode::IndexOutOfRange, "source site outside the grid");
  }
  ComplexVector b(n_sites);
  b[source.site] = source_weight(source, n, dt, dx, t0);
  return b;
}

Stepper::Stepper(const EvolutionOperator& op, std::optional<SourceSpec> source, double t0)
    : op_(&op), source_(std::move(source)), t0_(t0), work_(op.grid().n_sites()) {
  if (source_ && source_->site >= op.grid().n_sites()) {
    throw Error(ErrorCode::IndexOutOfRange, "source site outside the grid");
  }
}

void Stepper::advance(std::span<Complex> psi, std::size_t n) {
  const EvolutionOperator& op = *op_;
  if (psi.size() != work_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "wavefunction does not match the operator grid");
  }
  Complex b{};
  if (source_) b = source_weight(*source_, n, op.dt(), op.grid().dx(), t0_);

  if (op.strategy() == Strategy::TridiagonalSolve) {
    op.d1().apply(psi, work_);
    if (source_) work_[source_->site] -= b;
    op.factorization().solve(work_, psi);
    return;
  }
  op.product()->apply(psi, work_);
  if (source_) {
    const DenseMatrix& inv = *op.d2_inverse();
    const std::size_t s = source_->site;
    for (std::size_t i = 0; i < work_.size(); ++i) work_[i] -= inv(i, s) * b;
  }
  std::copy(work_.begin(), work_.end(), psi.begin());
}

WaveFunction step(const EvolutionOperator& op, const WaveFunction& psi, const SourceSpec* source,
                  std::size_t n, double t0) {
  if (!(psi.grid() == op.grid())) {
    throw Error(ErrorCode::ShapeMismatch, "wavefunction grid differs from the operator grid");
  }
  Stepper stepper(op, source ? std::optional<SourceSpec>(*source) : std::nullopt, t0);
  WaveFunction next = psi;
  stepper.advance(next.amplitudes(), n);
  return next;
}

}  // namespace cnprop
