#include <cmath>
#include <numbers>

#include "cnprop/analysis.hpp"
#include "cnprop/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cnprop;

namespace {

constexpr Complex kI{0.0, 1.0};

WaveFunction sampled_solution(const SpatialGrid& grid, double t, Complex s0, double omega,
                              double source_x) {
  WaveFunction psi(grid);
  for (std::size_t j = 0; j < grid.n_sites(); ++j) {
    psi[j] = analytic_source_solution(grid.position(j) - source_x, t, s0, omega);
  }
  return psi;
}

// |i dpsi/dt + 1/2 d2psi/dx2| by central differences with step h.
double pde_residual(double x, double t, double omega, double h) {
  const auto f = [&](double xx, double tt) { return analytic_source_solution(xx, tt, 5.0, omega); };
  const Complex dt = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
  const Complex dxx = (f(x + h, t) - 2.0 * f(x, t) + f(x - h, t)) / (h * h);
  return std::abs(kI * dt + 0.5 * dxx);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("analytic source solution") {
    const double omega = 12.5;
    const double k = std::sqrt(2.0 * omega);
    CHECK(std::abs(analytic_source_solution(0.0, 0.0, 5.0, omega) - (-kI * 5.0 / k)) < 1e-15);
    for (double x : {-3.0, -0.1, 0.0, 2.0, 7.5}) {
      CHECK(std::abs(analytic_source_solution(x, 1.3, 5.0, omega)) == doctest::Approx(5.0 / k));
    }
    CHECK(analytic_source_solution(1.5, 0.0, 5.0, omega) == analytic_source_solution(-1.5, 0.0, 5.0, omega));
    try {
      (void)analytic_source_solution(0.0, 0.0, 5.0, 0.0);
      FAIL("expected NonpositiveOmega");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonpositiveOmega);
    }
  }

  TEST_CASE("analytic source solution satisfies the free equation away from the source") {
    const double omega = 12.5;
    for (double x : {-2.0, 0.7, 4.0}) {
      const double r1 = pde_residual(x, 0.4, omega, 1e-2);
      const double r2 = pde_residual(x, 0.4, omega, 5e-3);
      CHECK(r1 < 0.05);
      CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.02));
    }
  }

  TEST_CASE("barrier transmission closed form") {
    CHECK(analytic_barrier_transmission(12.5, 0.0, 1.0) == 1.0);
    const double e = 12.5, a = 1.0;
    CHECK(analytic_barrier_transmission(e, e, a) == doctest::Approx(1.0 / (1.0 + e * a * a / 2.0)));
    // k' a = pi
    const double v0 = e - 0.5 * std::numbers::pi * std::numbers::pi;
    CHECK(analytic_barrier_transmission(e, v0, a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(analytic_barrier_transmission(0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(analytic_barrier_transmission(1.0, 1.0, 0.0), Error);
  }

  TEST_CASE("barrier transmission is continuous at the barrier top") {
    for (double e : {0.5, 12.5, 40.0}) {
      const double below = analytic_barrier_transmission(e, e * (1.0 + 1e-9), 1.0);
      const double above = analytic_barrier_transmission(e, e * (1.0 - 1e-9), 1.0);
      CHECK(std::abs(below - above) < 1e-6);
    }
  }

  TEST_CASE("barrier transmission agrees with transfer matrices") {
    for (double e : {2.0, 12.5, 30.0}) {
      for (double v0 : {-20.0, -3.0, 1.0, 10.0, 12.4, 12.6, 25.0, 40.0}) {
        for (double width : {0.3, 1.0, 2.5}) {
          const double t = analytic_barrier_transmission(e, v0, width);
          CHECK(t > 0.0);
          CHECK(t <= 1.0);
          CHECK(t == doctest::Approx(testing::transfer_matrix_transmission(e, v0, width))
                         .epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("opaque barrier limit") {
    double last = 1.0;
    for (double v0 = 13.0; v0 < 200.0; v0 += 5.0) {
      const double t = analytic_barrier_transmission(12.5, v0, 1.0);
      CHECK(t < last);
      last = t;
    }
    CHECK(last < 1e-10);
  }

  TEST_CASE("steady state error") {
    const SpatialGrid grid(-10.0, 10.0, 1000);
    const double omega = 12.505;
    const double sx = grid.position(500);
    const SteadyStateRegion region{-8.0, 8.0, sx, 2.0 * grid.dx()};
    const WaveFunction exact = sampled_solution(grid, 3.0, 5.0, omega, sx);
    CHECK(steady_state_error(exact, 5.0, omega, 3.0, region) < 1e-15);
    CHECK(steady_state_error(WaveFunction(grid), 5.0, omega, 3.0, region) == doctest::Approx(1.0));
    WaveFunction scaled = exact;
    for (auto& z : scaled.amplitudes()) z *= 1.01;
    CHECK(steady_state_error(scaled, 5.0, omega, 3.0, region) == doctest::Approx(0.01));
    const SteadyStateRegion empty{0.0, 0.01, sx, 1.0};
    try {
      (void)steady_state_error(exact, 5.0, omega, 3.0, empty);
      FAIL("expected EmptyRegion");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyRegion);
    }
  }

  TEST_CASE("transmission estimate from a settled field") {
    const SpatialGrid grid(-10.0, 10.0, 1000);
    const double omega = 12.505;
    const WaveFunction now = sampled_solution(grid, 10.0, 5.0, omega, -5.0);
    const WaveFunction earlier = sampled_solution(grid, 9.5, 5.0, omega, -5.0);
    const auto est = estimate_transmission(now, earlier, 5.0, omega, 0.5, 5.25, 1234);
    CHECK(est.t_numeric == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.monitor_x == 5.25);
    CHECK(est.settle_steps == 1234);
    CHECK_FALSE(est.overshoot);

    WaveFunction grown = now;
    for (auto& z : grown.amplitudes()) z *= 1.1;
    const auto big = estimate_transmission(grown, grown, 5.0, omega, 0.5, 5.25, 0);
    CHECK(big.overshoot);

    // still growing by 10% per probe
    try {
      (void)estimate_transmission(grown, now, 5.0, omega, 0.5, 5.25, 0);
      FAIL("expected NotSettled");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSettled);
    }
    // mirrored geometry monitors the left side
    const auto left = estimate_transmission(now, earlier, 5.0, omega, -0.5, -7.0, 0);
    CHECK(left.t_numeric == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("relative magnitude change") {
    const SpatialGrid grid(0.0, 1.0, 10);
    WaveFunction a(grid, ComplexVector(10, 1.0));
    WaveFunction b(grid, ComplexVector(10, kI));
    CHECK(relative_magnitude_change(a, b, 0.0, 1.0) == 0.0);
    CHECK(relative_magnitude_change(WaveFunction(grid), WaveFunction(grid), 0.0, 1.0) == 0.0);
    CHECK(relative_magnitude_change(WaveFunction(grid), a, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(relative_magnitude_change(a, b, 2.0, 3.0), Error);
  }
}
