#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "vpx/io.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/presets.hpp"

using namespace vpx;

namespace {

RecurrenceTable build_for(const char* name, int n_max) {
  const WeightSpec spec = preset(name);
  MrsTable mrs(spec);
  return build_recurrence(spec, mrs, n_max);
}

}  // namespace

TEST_CASE("Hermite recurrence coefficients: beta_k = sqrt(k/2)", "[orthopoly]") {
  // w = exp(-x^2/2) gives the measure exp(-x^2), the textbook Hermite case.
  const RecurrenceTable t = build_for("freud-hermite", 48);
  for (int k = 1; k <= 48; ++k) {
    CAPTURE(k);
    CHECK(t.beta[static_cast<std::size_t>(k)] ==
          Catch::Approx(std::sqrt(k / 2.0)).epsilon(1e-10));
  }
  // p_0 = pi^{-1/4} for the unit-mass normalization of exp(-x^2).
  CHECK(t.p0 == Catch::Approx(std::pow(M_PI, -0.25)).epsilon(1e-12));
  for (double a : t.alpha) CHECK(a == 0.0);
}

TEST_CASE("scaled measure exp(-2x^2): beta_k = sqrt(k)/2", "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-x2", 24);
  for (int k = 1; k <= 24; ++k) {
    CAPTURE(k);
    CHECK(t.beta[static_cast<std::size_t>(k)] ==
          Catch::Approx(std::sqrt(static_cast<double>(k)) / 2.0).epsilon(1e-10));
  }
}

TEST_CASE("orthonormality holds under an independent rule", "[orthopoly]") {
  for (const char* name : {"freud-x15", "freud-x4", "erdos-1"}) {
    CAPTURE(name);
    const RecurrenceTable t = build_for(name, 24);
    const QuadratureRule rule = make_verification_rule(t);
    CHECK(orthonormality_residual(t, rule, t.n_max + 1) < 1e-10);
  }
}

TEST_CASE("weighted evaluation equals raw times weight at moderate x",
          "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-x15", 20);
  for (double x : {0.0, 0.5, -1.7, 3.2}) {
    CAPTURE(x);
    const auto p = eval_polys(t, x, 21);
    const auto r = eval_polys_weighted(t, x, 21);
    const double w = weight_w(t.spec, x);
    for (int k = 0; k <= 20; ++k) {
      CAPTURE(k);
      CHECK(r[static_cast<std::size_t>(k)] ==
            Catch::Approx(p[static_cast<std::size_t>(k)] * w).epsilon(1e-12).margin(1e-300));
    }
  }
}

TEST_CASE("weighted evaluation survives the far field", "[orthopoly]") {
  // Raw values overflow near the truncation edge for fast-growing Q; the
  // weighted recurrence must stay finite (and tiny) there.
  const RecurrenceTable t = build_for("freud-x4", 32);
  const auto r = eval_polys_weighted(t, t.disc.L, 33);
  for (double v : r) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) < 1e-3);
  }
}

TEST_CASE("derivative of a weighted series matches finite differences",
          "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-hermite", 16);
  const auto c = testutil::random_coeffs(13, 20240817u);
  for (double x : {0.4, 1.9, -2.6}) {
    CAPTURE(x);
    // eval_series_deriv_weighted returns P'(x) w(x); recover it from the
    // weighted series: (Pw)' = P'w - Q' P w.
    auto pw = [&](double xx) { return eval_series_weighted(t, c, xx); };
    const double fd = testutil::fd1(pw, x, 1e-5 * (1.0 + std::abs(x)));
    const double qp = eval_Q(t.spec, x).Qp;
    const double want = fd + qp * pw(x);
    CHECK(eval_series_deriv_weighted(t, c, x) ==
          Catch::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("kernel reproduces polynomials under the build rule", "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-hermite", 16);
  const QuadratureRule rule = make_table_rule(t);
  // P = 2 p_0 + p_3 - 0.5 p_5; K_8 must reproduce it exactly.
  const std::vector<double> c = {2.0, 0.0, 0.0, 1.0, 0.0, -0.5};
  const double x = 0.7;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double ti = rule.x[i];
    acc += rule.w[i] * cd_kernel(t, 8, x, ti) * eval_series(t, c, ti) *
           weight_w2(t.spec, ti);
  }
  CHECK(acc == Catch::Approx(eval_series(t, c, x)).epsilon(1e-9));
}

TEST_CASE("kernel cross-check is active off the diagonal", "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-x15", 16);
  // A sweep of well-separated pairs: the sum and quotient forms must agree
  // (cd_kernel throws if they do not).
  for (double x : {-2.0, 0.3, 1.5})
    for (double tt : {-1.1, 0.9, 2.7})
      CHECK_NOTHROW(cd_kernel(t, 12, x, tt));
}

TEST_CASE("Christoffel function is positive and decreasing in degree",
          "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-hermite", 24);
  for (double x : {0.0, 1.3}) {
    CAPTURE(x);
    double prev = kInf;
    for (int m = 2; m <= 24; m += 2) {
      const double lam = christoffel(t, m, x);
      CHECK(lam > 0.0);
      CHECK(lam < prev);
      prev = lam;
    }
  }
}

TEST_CASE("weighted kernel diagonal ties to the Christoffel function",
          "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-x15", 20);
  for (double x : {0.2, 1.1, 2.9}) {
    CAPTURE(x);
    const double prod = kernel_diag_weighted(t, 16, x) * christoffel(t, 16, x);
    CHECK(prod == Catch::Approx(weight_w2(t.spec, x)).epsilon(1e-12));
  }
}

TEST_CASE("recurrence tables round-trip through JSON bit-exactly",
          "[orthopoly][io]") {
  const RecurrenceTable t = build_for("erdos-1", 12);
  const json j = recurrence_table_to_json(t);
  // Through a text round-trip, as the CLI writes it.
  const json j2 = json::parse(j.dump(2));
  const RecurrenceTable u = recurrence_table_from_json(j2);
  REQUIRE(u.n_max == t.n_max);
  CHECK(u.p0 == t.p0);
  for (int k = 0; k <= t.n_max; ++k) {
    CHECK(u.beta[static_cast<std::size_t>(k)] ==
          t.beta[static_cast<std::size_t>(k)]);
    CHECK(u.alpha[static_cast<std::size_t>(k)] == 0.0);
  }
  CHECK(u.disc.L == t.disc.L);
  CHECK(u.disc.nodes == t.disc.nodes);
}

TEST_CASE("degree gates throw DegreeError", "[orthopoly]") {
  const RecurrenceTable t = build_for("freud-hermite", 8);
  CHECK_THROWS_AS(eval_polys(t, 0.5, 10), DegreeError);
  CHECK_THROWS_AS(cd_kernel(t, 9, 0.5, 0.6), DegreeError);
  CHECK_THROWS_AS(christoffel(t, 10, 0.5), DegreeError);
}
