#pragma once

#include <cmath>
#include <array>
#include <complex>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cnprop/lattice.hpp"
#include "cnprop/tridiag.hpp"

namespace testing {

using cnprop::Complex;
using cnprop::ComplexVector;

using Dense = std::vector<ComplexVector>;

inline Dense to_dense(const cnprop::TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  Dense a(n, ComplexVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = m.diag[i];
    if (i + 1 < n) {
      a[i][i + 1] = m.super[i];
      a[i + 1][i] = m.sub[i];
    }
  }
  return a;
}

// Gaussian elimination with partial pivoting on a full copy of the matrix.
struct PivotedLu {
  Dense lu;
  std::vector<std::size_t> perm;
  int sign = 1;

  explicit PivotedLu(Dense a) : lu(std::move(a)), perm(lu.size()) {
    const std::size_t n = lu.size();
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu[i][k]) > std::abs(lu[p][k])) p = i;
      }
      if (p != k) {
        std::swap(lu[p], lu[k]);
        std::swap(perm[p], perm[k]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const Complex f = lu[i][k] / lu[k][k];
        lu[i][k] = f;
        if (f == Complex{}) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu[i][j] -= f * lu[k][j];
      }
    }
  }

  ComplexVector solve(const ComplexVector& b) const {
    const std::size_t n = lu.size();
    ComplexVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu[i][j] * y[j];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu[i][j] * y[j];
      y[i] = s / lu[i][i];
    }
    return y;
  }

  double log_abs_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lu.size(); ++i) s += std::log(std::abs(lu[i][i]));
    return s;
  }
};

inline Complex random_complex(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng)};
}

// Diagonally dominant random tridiagonal matrix.
inline cnprop::TridiagonalMatrix random_tridiagonal(std::mt19937_64& rng, std::size_t n,
                                                    bool symmetric_offdiag = false) {
  ComplexVector diag(n), super(n - 1), sub(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    super[i] = random_complex(rng, -1.0, 1.0);
    sub[i] = symmetric_offdiag ? super[i] : random_complex(rng, -1.0, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Complex d = random_complex(rng, -1.0, 1.0);
    diag[i] = d + Complex(3.0 * (d.real() >= 0 ? 1.0 : -1.0), 0.0);
  }
  if (symmetric_offdiag) {
    const Complex off = random_complex(rng, -1.0, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) super[i] = sub[i] = off;
  }
  return {diag, super, sub};
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline double relative_l2(std::span<const Complex> a, std::span<const Complex> ref) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += std::norm(a[i] - ref[i]);
  return std::sqrt(num) / l2(ref);
}

// Plane-wave transmission through a piecewise-constant potential by matching
// (psi, psi') across each interface.
inline double transfer_matrix_transmission(double e, double v0, double width) {
  using M = std::array<std::array<Complex, 2>, 2>;
  const auto layer = [](Complex k, double x) {
    // columns: exp(ikx), exp(-ikx); rows: psi, psi'
    const Complex ep = std::exp(Complex(0, 1) * k * x);
    const Complex em = std::exp(-Complex(0, 1) * k * x);
    return M{{{ep, em}, {Complex(0, 1) * k * ep, -Complex(0, 1) * k * em}}};
  };
  const auto inv = [](const M& m) {
    const Complex det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return M{{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
  };
  const auto mul = [](const M& a, const M& b) {
    M c{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
  };
  const Complex k = std::sqrt(Complex(2.0 * e, 0.0));
  Complex q = std::sqrt(Complex(2.0 * (e - v0), 0.0));
  if (q == Complex{}) q = Complex(1e-9, 0.0);
  // coefficients on the left from those on the right: c_L = T c_R
  const M t = mul(mul(inv(layer(k, 0.0)), mul(layer(q, 0.0), inv(layer(q, width)))),
                  layer(k, width));
  const Complex amp = 1.0 / t[0][0];
  return std::norm(amp);
}

}  // namespace testing

namespace testing {

// Random matrix with the absorbing-boundary shape: rows (eta2, eta1) at both
// ends, one shared interior off-diagonal.
inline cnprop::TridiagonalMatrix random_boundary_shape(std::mt19937_64& rng, std::size_t n) {
  cnprop::TridiagonalMatrix m = random_tridiagonal(rng, n, true);
  const Complex eta2 = Complex(3.5, 0.0) + random_complex(rng, -0.5, 0.5);
  const Complex eta1 = random_complex(rng, -1.0, 1.0);
  m.diag.front() = m.diag.back() = eta2;
  m.super.front() = eta1;
  m.sub.back() = eta1;
  return m;
}

}  // namespace testing
