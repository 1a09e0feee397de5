#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "vpx/presets.hpp"
#include "vpx/weights.hpp"

using namespace vpx;

namespace {
const std::vector<double> kSampleX = {0.3, 0.7, 1.1, 2.3, 4.9};
}

TEST_CASE("closed-form derivatives agree with finite differences",
          "[weights]") {
  for (const WeightSpec& spec : shipped_presets()) {
    CAPTURE(spec.name);
    auto q = [&](double x) { return eval_Q(spec, x).Q; };
    auto qp = [&](double x) { return eval_Q(spec, x).Qp; };
    for (double x : kSampleX) {
      CAPTURE(x);
      const QDerivatives d = eval_Q(spec, x);
      const double h = 1e-4 * (1.0 + x);
      CHECK(d.Qp == Catch::Approx(testutil::fd1(q, x, h)).epsilon(1e-6));
      CHECK(d.Qpp == Catch::Approx(testutil::fd1(qp, x, h)).epsilon(1e-6));
      CHECK(d.Qpp == Catch::Approx(testutil::fd2(q, x, h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("Q is even, Q' odd, T even — bitwise", "[weights]") {
  for (const WeightSpec& spec : shipped_presets()) {
    CAPTURE(spec.name);
    for (double x : kSampleX) {
      const QDerivatives dp = eval_Q(spec, x);
      const QDerivatives dm = eval_Q(spec, -x);
      CHECK(dp.Q == dm.Q);
      CHECK(dp.Qp == -dm.Qp);
      CHECK(dp.Qpp == dm.Qpp);
      CHECK(eval_T(spec, x) == eval_T(spec, -x));
    }
  }
}

TEST_CASE("pure power families have constant T", "[weights]") {
  for (const char* name : {"freud-hermite", "freud-x15", "freud-x4"}) {
    const WeightSpec spec = preset(name);
    for (double x : kSampleX)
      CHECK(eval_T(spec, x) == Catch::Approx(spec.alpha).epsilon(1e-13));
    CHECK(T_limit0(spec) == spec.alpha);
  }
  // Generalized power: T == alpha + u.
  WeightSpec gen;
  gen.family = WeightFamily::FreudGeneral;
  gen.alpha = 1.2;
  gen.u = 0.8;
  gen.validate();
  for (double x : kSampleX)
    CHECK(eval_T(gen, x) == Catch::Approx(2.0).epsilon(1e-13));
  CHECK(T_limit0(gen) == Catch::Approx(2.0));
}

TEST_CASE("Erdos weight matches the direct formula and has unbounded T",
          "[weights]") {
  const WeightSpec spec = preset("erdos-1");  // Q = |x| (e^|x| - 1)
  for (double x : kSampleX) {
    const double direct = x * std::expm1(x);
    CHECK(eval_Q(spec, x).Q == Catch::Approx(direct).epsilon(1e-14));
    const double direct_p = std::expm1(x) + x * std::exp(x);
    CHECK(eval_Q(spec, x).Qp == Catch::Approx(direct_p).epsilon(1e-14));
  }
  CHECK(T_limit0(spec) == Catch::Approx(2.0));
  // T grows roughly like x: strictly increasing on a coarse ladder, and
  // large at moderate x already.
  double prev = eval_T(spec, 0.5);
  for (double x : {2.0, 5.0, 10.0, 20.0}) {
    const double t = eval_T(spec, x);
    CHECK(t > prev);
    prev = t;
  }
  CHECK(eval_T(spec, 20.0) > 10.0);
}

TEST_CASE("two-level tower evaluates accurately near zero", "[weights]") {
  WeightSpec spec;
  spec.family = WeightFamily::Erdos;
  spec.alpha = 1.0;
  spec.u = 1.0;
  spec.ell = 2;
  spec.validate();
  // Q = |x| (e^{e^|x|} - e); for small x this is ~ e x^2 — the expm1 cascade
  // must not lose it to cancellation.
  const double x = 1e-8;
  const double got = eval_Q(spec, x).Q;
  const double want = x * (std::exp(std::exp(x)) - std::exp(1.0));
  // The naive formula above loses ~8 digits; compare against the series.
  const double series = std::exp(1.0) * x * x * (1.0 + x * (1.0 + x / 3.0));
  CHECK(got == Catch::Approx(series).epsilon(1e-12));
  CHECK(std::abs(want - got) < 1e-7 * std::abs(got) + 1e-30);
}

TEST_CASE("overflow guard and representable-range bound", "[weights]") {
  const WeightSpec spec = preset("erdos-1");
  CHECK_THROWS_AS(eval_Q(spec, 800.0), OverflowError);
  const double bound = max_abs_x(spec);
  CHECK(bound > 500.0);
  CHECK(bound < 720.0);
  CHECK_NOTHROW(eval_Q(spec, 0.99 * bound));
  CHECK_THROWS_AS(eval_Q(spec, 1.01 * bound), OverflowError);

  // Power families are effectively unbounded.
  CHECK(max_abs_x(preset("freud-hermite")) > 1e100);
}

TEST_CASE("T at zero is a domain error; tiny x falls back to the limit",
          "[weights]") {
  const WeightSpec spec = preset("freud-hermite");
  CHECK_THROWS_AS(eval_T(spec, 0.0), DomainError);
  // Far below the underflow point of Q the limit value is returned.
  CHECK(eval_T(spec, 1e-300) == Catch::Approx(T_limit0(spec)));
}

TEST_CASE("invalid specs are rejected", "[weights]") {
  WeightSpec s;
  s.family = WeightFamily::Freud;
  s.alpha = 1.0;  // needs > 1
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.alpha = 2.0;
  s.scale = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.scale = 1.0;
  s.family = WeightFamily::Erdos;
  s.ell = 0;  // Erdos needs >= 1
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.ell = 1;
  s.alpha = 0.5;
  s.u = 0.4;  // alpha + u <= 1
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("shipped presets satisfy the structural class conditions",
          "[weights]") {
  for (const WeightSpec& spec : shipped_presets()) {
    CAPTURE(spec.name);
    const ConditionReport rep =
        check_class_conditions(spec, condition_grid(spec));
    for (const auto& c : rep.checks) {
      CAPTURE(c.id, c.constant, c.witness_x);
      CHECK(c.pass);
    }
    const ConditionCheck* lam = rep.find("T_lower_bound");
    REQUIRE(lam != nullptr);
    CHECK(lam->constant >= 1.0 + 1e-9);
  }
}

TEST_CASE("T is stable under 1/T-scale shifts", "[weights]") {
  for (const WeightSpec& spec : shipped_presets()) {
    CAPTURE(spec.name);
    const auto grid = make_log_grid(0.05, std::min(50.0, 0.5 * max_abs_x(spec)), 200);
    const ConditionReport rep = check_T_shift_stability(spec, grid);
    for (const auto& c : rep.checks) {
      CAPTURE(c.id, c.constant);
      CHECK(c.pass);
    }
  }
}
