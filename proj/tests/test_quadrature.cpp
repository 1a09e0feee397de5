#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vpx/quadrature.hpp"

using namespace vpx;

TEST_CASE("Gauss-Legendre nodes match known low orders", "[quadrature]") {
  const auto& r2 = gauss_legendre(2);
  CHECK(r2.x[0] == Catch::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.x[1] == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.w[0] == Catch::Approx(1.0).epsilon(1e-14));

  const auto& r3 = gauss_legendre(3);
  CHECK(r3.x[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(r3.x[2] == Catch::Approx(std::sqrt(0.6)).epsilon(1e-14));
  CHECK(r3.w[1] == Catch::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(r3.w[2] == Catch::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre is exact through degree 2m-1", "[quadrature]") {
  const auto& rule = gauss_legendre(5);
  for (int deg = 0; deg <= 9; ++deg) {
    const double got = integrate(rule, [&](double x) { return std::pow(x, deg); });
    const double want = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1.0);
    CHECK(got == Catch::Approx(want).margin(1e-14));
  }
}

TEST_CASE("composite panels integrate a smooth function spectrally",
          "[quadrature]") {
  const QuadratureRule rule = composite_gauss({0.0, 0.3, 1.0}, 12);
  const double got = integrate(rule, [](double x) { return std::exp(x); });
  CHECK(got == Catch::Approx(std::expm1(1.0)).epsilon(1e-14));
}

TEST_CASE("symmetric panels are exactly mirror-symmetric", "[quadrature]") {
  const QuadratureRule rule = symmetric_panels(3.5, 4, 10);
  const std::size_t m = rule.size();
  REQUIRE(m == 2u * 4u * 10u);
  for (std::size_t i = 0; i < m / 2; ++i) {
    CHECK(rule.x[i] == -rule.x[m - 1 - i]);  // bitwise mirror
    CHECK(rule.w[i] == rule.w[m - 1 - i]);
  }
  double total = 0.0;
  for (double w : rule.w) total += w;
  CHECK(total == Catch::Approx(7.0).epsilon(1e-13));
}

TEST_CASE("Gauss-Chebyshev absorbs the endpoint singularity", "[quadrature]") {
  // Int_{-1}^{1} x^2 (1-x^2)^{-1/2} dx = pi/2, exact at tiny order.
  const QuadratureRule rule = gauss_chebyshev(8);
  const double got = integrate(rule, [](double x) { return x * x; });
  CHECK(got == Catch::Approx(M_PI / 2.0).epsilon(1e-14));
  // Odd integrands cancel exactly by node symmetry.
  const double odd = integrate(rule, [](double x) { return x * x * x; });
  CHECK(odd == Catch::Approx(0.0).margin(1e-15));
}
