#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cnprop/lattice.hpp"

namespace cnprop {

/// Largest N accepted by the dense-inverse routines.
inline constexpr std::size_t kDenseCap = 4096;

/// Complex tridiagonal matrix with diagonal a, super-diagonal b, sub-diagonal c.
///
/// Using 0-based storage, row i holds (c[i-1], a[i], b[i]).
struct TridiagonalMatrix {
  ComplexVector diag;
  ComplexVector super;
  ComplexVector sub;

  TridiagonalMatrix() = default;
  TridiagonalMatrix(ComplexVector diag, ComplexVector super, ComplexVector sub);

  std::size_t size() const noexcept { return diag.size(); }

  /// y = M x.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  ComplexVector apply(std::span<const Complex> x) const;

  /// Largest |entry|, used as the scale for pivot tests.
  double max_abs_entry() const noexcept;

  static TridiagonalMatrix identity(std::size_t n);
};

/// Complex number held as mantissa * 2^exponent.
///
/// The mantissa is normalized so that max(|re|, |im|) lies in [0.5, 1).
/// Products and sums of very large or very small recurrence terms stay
/// representable; only value() materializes an ordinary double.
class ScaledComplex {
 public:
  ScaledComplex() = default;
  ScaledComplex(Complex z);  // NOLINT(google-explicit-constructor)

  Complex mantissa() const noexcept { return mantissa_; }
  long exponent() const noexcept { return exponent_; }
  bool is_zero() const noexcept { return mantissa_ == Complex{}; }

  /// Ordinary complex value; overflows to inf and underflows to 0.
  Complex value() const noexcept;
  /// Natural log of the modulus, -inf for zero.
  double log_abs() const noexcept;
  double arg() const noexcept { return std::arg(mantissa_); }

  friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b);
  friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b);
  friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b);
  friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b);
  ScaledComplex operator-() const noexcept;

 private:
  ScaledComplex(Complex mantissa, long exponent);
  void normalize() noexcept;

  Complex mantissa_{};
  long exponent_ = 0;
};

/// Forward and backward three-term recurrences of a tridiagonal matrix:
///   theta_i = a_i theta_{i-1} - b_{i-1} c_{i-1} theta_{i-2},  theta_0 = 1, theta_1 = a_1
///   phi_i   = a_i phi_{i+1}   - b_i c_i phi_{i+2},            phi_{N+1} = 1, phi_N = a_N
/// Indices are 1-based as in the recurrence; theta_N is the determinant.
class UsmaniFactors {
 public:
  UsmaniFactors(std::vector<ScaledComplex> theta, std::vector<ScaledComplex> phi);

  std::size_t size() const noexcept { return theta_.size() - 1; }
  /// theta_i for i in [0, N].
  const ScaledComplex& theta(std::size_t i) const { return theta_.at(i); }
  /// phi_i for i in [1, N + 1].
  const ScaledComplex& phi(std::size_t i) const { return phi_.at(i - 1); }
  const ScaledComplex& determinant() const { return theta_.back(); }

 private:
  std::vector<ScaledComplex> theta_;
  std::vector<ScaledComplex> phi_;
};

/// Dense N x N complex matrix, row-major in one allocation.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const Complex> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }

  /// y = M x.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  ComplexVector apply(std::span<const Complex> x) const;

  std::span<const Complex> data() const noexcept { return data_; }

  static DenseMatrix identity(std::size_t n);

 private:
  std::size_t n_ = 0;
  ComplexVector data_;
};

/// Runs both recurrences. Throws SingularMatrix when |theta_N| < 1e-300.
UsmaniFactors usmani_factors(const TridiagonalMatrix& m);

/// Closed-form inverse of a general nonsingular tridiagonal matrix.
DenseMatrix usmani_inverse(const TridiagonalMatrix& m);

/// Inverse of a tridiagonal matrix whose off-diagonals all equal the same
/// constant. Only the upper triangle is evaluated; the lower is its mirror.
/// Throws NotSymmetricOffdiag when the precondition fails.
DenseMatrix symmetric_inverse(const TridiagonalMatrix& m);

/// Inverse of the absorbing-boundary evolution matrix: interior off-diagonals
/// equal to one constant, boundary rows (eta2, eta1) and (eta1, eta2).
/// Throws ShapeMismatch when m does not have that shape.
DenseMatrix abc_inverse(const TridiagonalMatrix& m);

/// Forward elimination of a tridiagonal matrix without pivoting, reusable for
/// many right-hand sides.
class ThomasFactorization {
 public:
  ThomasFactorization() = default;
  /// Throws SingularMatrix when a pivot falls below 1e-14 * max |entry|.
  explicit ThomasFactorization(const TridiagonalMatrix& m);

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  /// Solves M x = rhs. rhs and x may alias.
  void solve(std::span<const Complex> rhs, std::span<Complex> x) const;
  ComplexVector solve(std::span<const Complex> rhs) const;

  /// Product of the elimination pivots.
  ScaledComplex determinant() const;

 private:
  ComplexVector sub_;
  ComplexVector upper_;      // modified super-diagonal b_i / pivot_i
  ComplexVector inv_pivot_;  // 1 / pivot_i
  ComplexVector pivot_;
};

/// Solves M x = rhs by elimination.
ComplexVector thomas_solve(const TridiagonalMatrix& m, std::span<const Complex> rhs);

}  // namespace cnprop
