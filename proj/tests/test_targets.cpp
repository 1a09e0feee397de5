#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "vpx/presets.hpp"
#include "vpx/targets.hpp"

using namespace vpx;

TEST_CASE("parse_target: bare builtins evaluate correctly", "[targets]") {
  const WeightSpec spec = preset("freud-hermite");

  const TargetFunction s = parse_target("builtin:sin", spec);
  CHECK(s.name == "sin");
  CHECK(s.smooth);
  CHECK(s.f(0.3) == Catch::Approx(std::sin(0.3)).epsilon(1e-15));

  const TargetFunction r = parse_target("builtin:runge", spec);
  CHECK(r.f(0.2) == Catch::Approx(1.0 / 2.0).epsilon(1e-15));

  const TargetFunction a = parse_target("builtin:abs", spec);
  CHECK_FALSE(a.smooth);
  CHECK(a.f(-3.0) == 3.0);
  CHECK(a.kinks(10.0).empty());  // mirror point 0 is always a panel edge
}

TEST_CASE("parse_target: parenthesized forms", "[targets]") {
  const WeightSpec spec = preset("freud-hermite");

  const TargetFunction g = parse_target("builtin:gauss-bump(1.5,0.5)", spec);
  CHECK(g.f(1.5) == 1.0);
  CHECK(g.f(2.0) == Catch::Approx(std::exp(-0.5)).epsilon(1e-15));

  // p(x) = 1 + 2x + 3x^2: p(2) = 17, p'(2) = 14.
  const TargetFunction p = parse_target("builtin:poly(1,2,3)", spec);
  CHECK(p.f(2.0) == Catch::Approx(17.0).epsilon(1e-15));
  CHECK(p.df(2.0) == Catch::Approx(14.0).epsilon(1e-15));

  const TargetFunction c = parse_target("builtin:characteristic(-1,1)", spec);
  CHECK(c.f(0.0) == 1.0);
  CHECK(c.f(-1.0) == 1.0);  // half-open [a, b)
  CHECK(c.f(1.0) == 0.0);
  const auto br = c.kinks(5.0);
  REQUIRE(br.size() == 2);
  CHECK(br[0] == -1.0);
  CHECK(br[1] == 1.0);
}

TEST_CASE("parse_target: malformed descriptors throw ConfigError", "[targets]") {
  const WeightSpec spec = preset("freud-hermite");
  CHECK_THROWS_AS(parse_target("sin", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:nope", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:poly(1,x)", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:poly()", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:poly(1,2", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:gauss-bump(1)", spec), ConfigError);
  CHECK_THROWS_AS(parse_target("builtin:characteristic(2,1)", spec),
                  ConfigError);
}

TEST_CASE("constructor guards", "[targets]") {
  CHECK_THROWS_AS(target_gauss_bump(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(target_gauss_bump(0.0, -1.0), ConfigError);
  CHECK_THROWS_AS(target_characteristic(1.0, 1.0), ConfigError);
  const WeightSpec spec = preset("freud-hermite");
  CHECK_THROWS_AS(target_winv_clamped(spec, 0.5), ConfigError);
}

TEST_CASE("closed-form derivatives match finite differences", "[targets]") {
  std::vector<TargetFunction> smooth = {
      target_sin(), target_cos(), target_runge(), target_gauss_bump(0.7, 0.4),
      target_poly({0.5, -1.0, 0.0, 2.0})};
  for (const auto& t : smooth) {
    REQUIRE(t.smooth);
    REQUIRE(t.df);
    for (double x : {-1.3, -0.2, 0.0, 0.45, 2.1}) {
      const double fd = testutil::fd1(t.f, x, 1e-3);
      INFO(t.name << " at x = " << x);
      CHECK(t.df(x) == Catch::Approx(fd).margin(1e-8));
    }
  }
}

TEST_CASE("square wave breakpoints sit on actual sign changes", "[targets]") {
  const TargetFunction t = target_sign();
  const double L = 4.0;
  const auto br = t.kinks(L);
  // Multiples of pi/3 below 4: pi/3, 2pi/3, pi.
  REQUIRE(br.size() == 3);
  for (std::size_t k = 0; k < br.size(); ++k) {
    CHECK(br[k] == Catch::Approx((k + 1) * M_PI / 3.0).epsilon(1e-12));
    const double eps = 1e-9;
    CHECK(t.f(br[k] - eps) * t.f(br[k] + eps) < 0.0);  // genuine jump
  }
  CHECK(t.kinks(1.0).empty());
}

TEST_CASE("clamped inverse weight: kink where the clamp engages", "[targets]") {
  const WeightSpec spec = preset("freud-hermite");
  const double cap = 1e6;
  const TargetFunction t = target_winv_clamped(spec, cap);

  // Q(x) = x^2 / 2 crosses log(cap) at sqrt(2 log cap).
  const double xc = std::sqrt(2.0 * std::log(cap));
  const auto br = t.kinks(10.0);
  REQUIRE(br.size() == 1);
  CHECK(br[0] == Catch::Approx(xc).epsilon(1e-10));

  // Continuous across the clamp: both sides approach cap.
  CHECK(t.f(xc * (1.0 - 1e-8)) == Catch::Approx(cap).epsilon(1e-6));
  CHECK(t.f(xc * (1.0 + 1e-8)) == Catch::Approx(cap).epsilon(1e-6));
  // Inside the clamp radius f = 1/w, outside it saturates.
  CHECK(t.f(0.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(t.f(8.0) == cap);

  // A window that stops short of the crossing reports no interior breaks.
  CHECK(t.kinks(xc - 1.0).empty());
}

TEST_CASE("ratio dictionary: bump placement tracks the scale point",
          "[targets]") {
  const WeightSpec spec = preset("freud-hermite");
  const double a_n = 8.0;
  const auto dict = ratio_dictionary(spec, a_n);
  REQUIRE(dict.size() == 9);
  CHECK(dict[0].name == "sin");
  CHECK(dict[3].name == "sign");
  CHECK(dict[6].name == "gauss-bump@a/2");
  CHECK(dict[7].name == "gauss-bump@a");
  CHECK(dict[8].name == "winv");
  CHECK(dict[6].f(0.5 * a_n) == 1.0);
  CHECK(dict[7].f(a_n) == 1.0);
  CHECK(dict[7].f(0.0) == Catch::Approx(std::exp(-0.5 * a_n * a_n)));
}

TEST_CASE("fixed sweep dictionaries", "[targets]") {
  const auto conv = convergence_targets();
  REQUIRE(conv.size() == 3);
  CHECK(conv[0].smooth);        // sin
  CHECK_FALSE(conv[1].smooth);  // abs
  CHECK(conv[2].smooth);        // runge

  for (const auto& t : smooth_targets()) {
    CHECK(t.smooth);
    CHECK(static_cast<bool>(t.df));
  }
}
