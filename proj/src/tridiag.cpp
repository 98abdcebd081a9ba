#include "cnprop/tridiag.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <string>

#include "cnprop/error.hpp"

namespace cnprop {
namespace {

constexpr double kMinDeterminant = 1e-300;
constexpr double kPivotTolerance = 1e-14;

void check_dense_size(std::size_t n) {
  if (n > kDenseCap) {
    throw Error(ErrorCode::DensePathCapExceeded,
                "dense inverse requested for N = " + std::to_string(n) +
                    " (cap " + std::to_string(kDenseCap) + ")");
  }
}

void check_nonsingular(const ScaledComplex& det) {
  if (!(det.log_abs() >= std::log(kMinDeterminant))) {
    throw Error(ErrorCode::SingularMatrix, "tridiagonal matrix is singular (|theta_N| < 1e-300)");
  }
}

// Scaled powers z^0 .. z^n.
std::vector<ScaledComplex> scaled_powers(Complex z, std::size_t n) {
  std::vector<ScaledComplex> powers(n + 1);
  powers[0] = ScaledComplex(1.0);
  const ScaledComplex base(z);
  for (std::size_t k = 1; k <= n; ++k) powers[k] = powers[k - 1] * base;
  return powers;
}

}  // namespace

// ---------------------------------------------------------------------------
// TridiagonalMatrix

TridiagonalMatrix::TridiagonalMatrix(ComplexVector diag, ComplexVector super, ComplexVector sub)
    : diag(std::move(diag)), super(std::move(super)), sub(std::move(sub)) {
  const std::size_t n = this->diag.size();
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "tridiagonal matrix requires N >= 1");
  if (this->super.size() != n - 1 || this->sub.size() != n - 1) {
    throw Error(ErrorCode::ShapeMismatch,
                "off-diagonals must have N - 1 = " + std::to_string(n - 1) + " entries");
  }
}

void TridiagonalMatrix::apply(std::span<const Complex> x, std::span<Complex> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "tridiagonal apply: vector length mismatch");
  }
  if (n == 1) {
    y[0] = diag[0] * x[0];
    return;
  }
  y[0] = diag[0] * x[0] + super[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = sub[i - 1] * x[i - 1] + diag[i] * x[i] + super[i] * x[i + 1];
  }
  y[n - 1] = sub[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

ComplexVector TridiagonalMatrix::apply(std::span<const Complex> x) const {
  ComplexVector y(size());
  apply(x, y);
  return y;
}

double TridiagonalMatrix::max_abs_entry() const noexcept {
  double m = 0.0;
  for (const auto* v : {&diag, &super, &sub}) {
    for (Complex z : *v) m = std::max(m, std::abs(z));
  }
  return m;
}

TridiagonalMatrix TridiagonalMatrix::identity(std::size_t n) {
  return TridiagonalMatrix(ComplexVector(n, 1.0), ComplexVector(n ? n - 1 : 0),
                           ComplexVector(n ? n - 1 : 0));
}

// ---------------------------------------------------------------------------
// ScaledComplex

ScaledComplex::ScaledComplex(Complex z) : mantissa_(z), exponent_(0) { normalize(); }

ScaledComplex::ScaledComplex(Complex mantissa, long exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  normalize();
}

void ScaledComplex::normalize() noexcept {
  const double big = std::max(std::abs(mantissa_.real()), std::abs(mantissa_.imag()));
  if (big == 0.0 || !std::isfinite(big)) {
    if (big == 0.0) {
      mantissa_ = Complex{};
      exponent_ = 0;
    }
    return;
  }
  int k = 0;
  std::frexp(big, &k);
  mantissa_ = Complex(std::ldexp(mantissa_.real(), -k), std::ldexp(mantissa_.imag(), -k));
  exponent_ += k;
}

Complex ScaledComplex::value() const noexcept {
  if (is_zero()) return {};
  const long e = std::clamp(exponent_, -4000L, 4000L);
  return {std::ldexp(mantissa_.real(), static_cast<int>(e)),
          std::ldexp(mantissa_.imag(), static_cast<int>(e))};
}

double ScaledComplex::log_abs() const noexcept {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa_)) + static_cast<double>(exponent_) * std::log(2.0);
}

ScaledComplex ScaledComplex::operator-() const noexcept {
  ScaledComplex r = *this;
  r.mantissa_ = -r.mantissa_;
  return r;
}

ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return {a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_};
}

ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
  if (b.is_zero()) {
    throw Error(ErrorCode::SingularMatrix, "division by zero in scaled arithmetic");
  }
  if (a.is_zero()) return {};
  return {a.mantissa_ / b.mantissa_, a.exponent_ - b.exponent_};
}

ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const ScaledComplex& hi = a.exponent_ >= b.exponent_ ? a : b;
  const ScaledComplex& lo = a.exponent_ >= b.exponent_ ? b : a;
  const long shift = hi.exponent_ - lo.exponent_;
  if (shift > 120) return hi;
  const int s = static_cast<int>(shift);
  const Complex aligned(std::ldexp(lo.mantissa_.real(), -s), std::ldexp(lo.mantissa_.imag(), -s));
  return {hi.mantissa_ + aligned, hi.exponent_};
}

ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) { return a + (-b); }

// ---------------------------------------------------------------------------
// UsmaniFactors

UsmaniFactors::UsmaniFactors(std::vector<ScaledComplex> theta, std::vector<ScaledComplex> phi)
    : theta_(std::move(theta)), phi_(std::move(phi)) {
  if (theta_.size() < 2 || phi_.size() != theta_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "recurrence sequences must both hold N + 1 values");
  }
}

UsmaniFactors usmani_factors(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "tridiagonal matrix requires N >= 1");
  // 1-based recurrence indices; a_i = diag[i-1], b_i = super[i-1], c_i = sub[i-1].
  const auto a = [&](std::size_t i) { return ScaledComplex(m.diag[i - 1]); };
  const auto bc = [&](std::size_t i) { return ScaledComplex(m.super[i - 1] * m.sub[i - 1]); };

  std::vector<ScaledComplex> theta(n + 1);
  theta[0] = ScaledComplex(1.0);
  theta[1] = a(1);
  for (std::size_t i = 2; i <= n; ++i) {
    theta[i] = a(i) * theta[i - 1] - bc(i - 1) * theta[i - 2];
  }

  // phi stored at offset -1: phi[k] holds phi_{k+1}.
  std::vector<ScaledComplex> phi(n + 1);
  phi[n] = ScaledComplex(1.0);
  phi[n - 1] = a(n);
  for (std::size_t i = n - 1; i >= 1; --i) {
    phi[i - 1] = a(i) * phi[i] - bc(i) * phi[i + 1];
  }

  check_nonsingular(theta[n]);
  return UsmaniFactors(std::move(theta), std::move(phi));
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t n) : n_(n), data_(n * n) {}

void DenseMatrix::apply(std::span<const Complex> x, std::span<Complex> y) const {
  if (x.size() != n_ || y.size() != n_) {
    throw Error(ErrorCode::ShapeMismatch, "dense apply: vector length mismatch");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const Complex* r = data_.data() + i * n_;
    Complex acc{};
    for (std::size_t j = 0; j < n_; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

ComplexVector DenseMatrix::apply(std::span<const Complex> x) const {
  ComplexVector y(n_);
  apply(x, y);
  return y;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// Closed-form inverses

DenseMatrix usmani_inverse(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  check_dense_size(n);
  const UsmaniFactors f = usmani_factors(m);
  const ScaledComplex& det = f.determinant();

  DenseMatrix inv(n);
  for (std::size_t i = 1; i <= n; ++i) {
    // i <= j: (-1)^{i+j} b_i..b_{j-1} theta_{i-1} phi_{j+1} / theta_N
    const ScaledComplex row_factor = f.theta(i - 1) / det;
    ScaledComplex prod(1.0);
    for (std::size_t j = i; j <= n; ++j) {
      inv(i - 1, j - 1) = (prod * row_factor * f.phi(j + 1)).value();
      if (j < n) prod = prod * ScaledComplex(-m.super[j - 1]);
    }
    // i > j: (-1)^{i+j} c_j..c_{i-1} theta_{j-1} phi_{i+1} / theta_N
    const ScaledComplex col_factor = f.phi(i + 1) / det;
    prod = ScaledComplex(1.0);
    for (std::size_t j = i - 1; j >= 1; --j) {
      prod = prod * ScaledComplex(-m.sub[j - 1]);
      inv(i - 1, j - 1) = (prod * col_factor * f.theta(j - 1)).value();
    }
  }
  return inv;
}

DenseMatrix symmetric_inverse(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  check_dense_size(n);
  const Complex off = n > 1 ? m.super[0] : Complex{};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.super[k] != off || m.sub[k] != off) {
      throw Error(ErrorCode::NotSymmetricOffdiag,
                  "symmetric inverse requires every off-diagonal entry equal; mismatch at " +
                      std::to_string(k));
    }
  }
  const UsmaniFactors f = usmani_factors(m);
  const ScaledComplex& det = f.determinant();
  // (-1)^{i+j} (off)^{j-i} = (-off)^{j-i}
  const auto powers = scaled_powers(-off, n);

  DenseMatrix inv(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const ScaledComplex row_factor = f.theta(i - 1) / det;
    for (std::size_t j = i; j <= n; ++j) {
      const Complex d = (powers[j - i] * row_factor * f.phi(j + 1)).value();
      inv(i - 1, j - 1) = d;
      inv(j - 1, i - 1) = d;
    }
  }
  return inv;
}

DenseMatrix abc_inverse(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  if (n < 3) throw Error(ErrorCode::ShapeMismatch, "boundary-row inverse requires N >= 3");
  check_dense_size(n);

  const Complex eta2 = m.diag[0];
  const Complex eta1 = m.super[0];
  const Complex off = m.sub[0];  // -alpha
  bool ok = m.diag[n - 1] == eta2 && m.sub[n - 2] == eta1;
  for (std::size_t k = 1; k + 1 < n; ++k) ok = ok && m.super[k] == off;
  for (std::size_t k = 0; k + 2 < n; ++k) ok = ok && m.sub[k] == off;
  if (!ok) {
    throw Error(ErrorCode::ShapeMismatch,
                "matrix lacks the boundary-row shape (eta2, eta1 | -alpha interior | eta1, eta2)");
  }
  const Complex alpha = -off;
  const ScaledComplex s_eta2(eta2);
  const ScaledComplex alpha_eta1(alpha * eta1);
  const ScaledComplex alpha_sq(alpha * alpha);
  const auto xi = [&](std::size_t i) { return ScaledComplex(m.diag[i - 1]); };

  // theta_0 .. theta_N
  std::vector<ScaledComplex> theta(n + 1);
  theta[0] = ScaledComplex(1.0);
  theta[1] = s_eta2;
  theta[2] = xi(2) * s_eta2 + alpha_eta1;
  for (std::size_t i = 3; i + 1 <= n; ++i) {
    theta[i] = xi(i) * theta[i - 1] - alpha_sq * theta[i - 2];
  }
  theta[n] = s_eta2 * theta[n - 1] + alpha_eta1 * theta[n - 2];

  // phi_1 .. phi_{N+1}, stored 1-based (phi[0] unused).
  std::vector<ScaledComplex> phi(n + 2);
  phi[n + 1] = ScaledComplex(1.0);
  phi[n] = s_eta2;
  phi[n - 1] = xi(n - 1) * s_eta2 + alpha_eta1;
  for (std::size_t i = n - 2; i >= 2; --i) {
    phi[i] = xi(i) * phi[i + 1] - alpha_sq * phi[i + 2];
  }
  phi[1] = s_eta2 * phi[2] + alpha_eta1 * phi[3];

  const ScaledComplex& det = theta[n];
  check_nonsingular(det);

  // (-1)^{i+j} (-alpha)^{|j-i|} = alpha^{|j-i|}
  const auto powers = scaled_powers(alpha, n);
  const ScaledComplex minus_eta1(-eta1);

  DenseMatrix inv(n);
  // Row 1.
  inv(0, 0) = (phi[2] / det).value();
  for (std::size_t j = 2; j <= n; ++j) {
    inv(0, j - 1) = (minus_eta1 * powers[j - 2] * phi[j + 1] / det).value();
  }
  // Rows 2 .. N-1.
  for (std::size_t i = 2; i + 1 <= n; ++i) {
    const ScaledComplex upper = theta[i - 1] / det;
    for (std::size_t j = i; j <= n; ++j) {
      inv(i - 1, j - 1) = (powers[j - i] * upper * phi[j + 1]).value();
    }
    const ScaledComplex lower = phi[i + 1] / det;
    for (std::size_t j = 1; j < i; ++j) {
      inv(i - 1, j - 1) = (powers[i - j] * lower * theta[j - 1]).value();
    }
  }
  // Row N.
  for (std::size_t j = 1; j + 1 <= n; ++j) {
    inv(n - 1, j - 1) = (minus_eta1 * powers[n - 1 - j] * theta[j - 1] / det).value();
  }
  inv(n - 1, n - 1) = (theta[n - 1] / det).value();
  return inv;
}

// ---------------------------------------------------------------------------
// Elimination

ThomasFactorization::ThomasFactorization(const TridiagonalMatrix& m)
    : sub_(m.sub), upper_(m.size()), inv_pivot_(m.size()), pivot_(m.size()) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "tridiagonal matrix requires N >= 1");
  const double threshold = kPivotTolerance * m.max_abs_entry();
  for (std::size_t i = 0; i < n; ++i) {
    Complex p = m.diag[i];
    if (i > 0) p -= m.sub[i - 1] * upper_[i - 1];
    if (!(std::abs(p) >= threshold) || p == Complex{}) {
      throw Error(ErrorCode::SingularMatrix,
                  "zero pivot at row " + std::to_string(i) + " during elimination");
    }
    pivot_[i] = p;
    inv_pivot_[i] = 1.0 / p;
    upper_[i] = i + 1 < n ? m.super[i] * inv_pivot_[i] : Complex{};
  }
}

void ThomasFactorization::solve(std::span<const Complex> rhs, std::span<Complex> x) const {
  const std::size_t n = size();
  if (rhs.size() != n || x.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "thomas solve: vector length mismatch");
  }
  x[0] = rhs[0] * inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    x[i] = (rhs[i] - sub_[i - 1] * x[i - 1]) * inv_pivot_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
}

ComplexVector ThomasFactorization::solve(std::span<const Complex> rhs) const {
  ComplexVector x(size());
  solve(rhs, x);
  return x;
}

ScaledComplex ThomasFactorization::determinant() const {
  ScaledComplex det(1.0);
  for (Complex p : pivot_) det = det * ScaledComplex(p);
  return det;
}

ComplexVector thomas_solve(const TridiagonalMatrix& m, std::span<const Complex> rhs) {
  if (rhs.size() != m.size()) {
    throw Error(ErrorCode::ShapeMismatch, "thomas solve: rhs length mismatch");
  }
  return ThomasFactorization(m).solve(rhs);
}

}  // namespace cnprop
