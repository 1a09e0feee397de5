#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "vpx/mrs.hpp"
#include "vpx/presets.hpp"

using namespace vpx;

TEST_CASE("MRS numbers match the closed form for power weights", "[mrs]") {
  for (double alpha : {1.5, 2.0, 3.0, 4.0}) {
    for (double scale : {1.0, 2.0}) {
      WeightSpec spec;
      spec.family = WeightFamily::Freud;
      spec.alpha = alpha;
      spec.scale = scale;
      for (double n : {1.0, 3.0, 8.0, 64.0, 256.0}) {
        CAPTURE(alpha, scale, n);
        const double want = testutil::mrs_closed_form(alpha, scale, n);
        const double got = mrs_number(spec, n);
        CHECK(got == Catch::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("Hermite-normalized weight has a_n = sqrt(2n)", "[mrs]") {
  const WeightSpec spec = preset("freud-hermite");
  for (double n : {1.0, 2.0, 8.0, 128.0})
    CHECK(mrs_number(spec, n) == Catch::Approx(std::sqrt(2.0 * n)).epsilon(1e-11));
}

TEST_CASE("a_n is strictly increasing in n", "[mrs]") {
  for (const char* name : {"freud-x15", "erdos-1"}) {
    const WeightSpec spec = preset(name);
    CAPTURE(name);
    double prev = 0.0;
    for (double n : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      const double a = mrs_number(spec, n);
      CHECK(a > prev);
      prev = a;
    }
  }
}

TEST_CASE("Erdos MRS numbers grow only logarithmically", "[mrs]") {
  const WeightSpec spec = preset("erdos-1");
  const double a64 = mrs_number(spec, 64.0);
  CHECK(a64 > 1.0);
  CHECK(a64 < 6.0);
  // Quadrupling n stretches a_n by well under the Freud factor 4^{1/alpha}
  // (the growth is logarithmic; doubling increments approach log 2).
  const double a128 = mrs_number(spec, 128.0);
  const double a256 = mrs_number(spec, 256.0);
  CHECK(a256 / a64 < 1.35);
  CHECK(a256 - a128 < 1.2 * std::log(2.0));
}

TEST_CASE("degrees beyond the representable range fail to bracket", "[mrs]") {
  const WeightSpec spec = preset("erdos-1");
  CHECK_THROWS_AS(mrs_number(spec, 1e300), NoBracketError);
}

// Regression: the defining integral is strongly convex in a for
// doubly-exponential Q, which stalls plain false position (one bracket
// endpoint goes stale). The damped update must still converge, and to the
// right value: G(a_n) = n must hold on re-evaluation.
TEST_CASE("root solve converges for steep Erdos growth at large n", "[mrs]") {
  const WeightSpec spec = preset("erdos-1");
  for (double n : {384.0, 512.0, 4096.0}) {
    const double a = mrs_number(spec, n);
    CHECK(std::isfinite(a));
    const double back = detail::mrs_G_fine(spec, a, 200);
    CHECK(back == Catch::Approx(n).epsilon(1e-11));
  }
}

TEST_CASE("MrsTable caches and gates lookups", "[mrs]") {
  MrsTable mrs(preset("freud-hermite"));
  CHECK_THROWS_AS(mrs.a(4.0), DegreeError);
  mrs.prepare({4.0, 8.0});
  CHECK(mrs.has(4.0));
  CHECK(mrs.has(8.0));
  CHECK(mrs.has(16.0));  // prepare covers 2n
  CHECK(mrs.a(4.0) == Catch::Approx(std::sqrt(8.0)).epsilon(1e-11));
}

TEST_CASE("delta_n matches its definition for constant-T weights", "[mrs]") {
  MrsTable mrs(preset("freud-hermite"));  // T == 2 everywhere
  mrs.prepare({8.0});
  CHECK(delta_n(mrs, 8.0) ==
        Catch::Approx(std::pow(16.0, -2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("edge profile: closed-form anchors and branch continuity", "[mrs]") {
  MrsTable mrs(preset("freud-hermite"));
  mrs.prepare({8.0});
  const double d8 = std::pow(16.0, -2.0 / 3.0);

  // Center value: (1 - 0) / sqrt(1 + delta_8).
  CHECK(phi_profile(mrs, 8.0, 0.0) ==
        Catch::Approx(1.0 / std::sqrt(1.0 + d8)).epsilon(1e-10));

  // Interior point x = 2 with a_8 = 4, a_16 = sqrt(32).
  const double want2 =
      (1.0 - 2.0 / std::sqrt(32.0)) / std::sqrt(1.0 - 0.5 + d8);
  CHECK(phi_profile(mrs, 8.0, 2.0) == Catch::Approx(want2).epsilon(1e-10));

  // Outside the edge the profile freezes at its a_n value.
  const double an = mrs.a(8.0);
  const double frozen = (1.0 - an / mrs.a(16.0)) / std::sqrt(d8);
  CHECK(phi_profile(mrs, 8.0, an + 1.0) == Catch::Approx(frozen).epsilon(1e-10));
  CHECK(phi_profile(mrs, 8.0, 100.0) == phi_profile(mrs, 8.0, an + 1.0));

  // Branch seam is continuous.
  CHECK(phi_profile(mrs, 8.0, an * (1.0 - 1e-9)) ==
        Catch::Approx(phi_profile(mrs, 8.0, an * (1.0 + 1e-9))).epsilon(1e-6));

  // Evenness and the spacing function wiring.
  CHECK(phi_profile(mrs, 8.0, -2.0) == phi_profile(mrs, 8.0, 2.0));
  CHECK(spacing_fn(mrs, 8.0, 2.0) ==
        Catch::Approx(an / 8.0 * want2).epsilon(1e-10));
}

TEST_CASE("growth-compatibility check passes for shipped presets", "[mrs]") {
  for (const WeightSpec& spec : shipped_presets()) {
    CAPTURE(spec.name);
    MrsTable mrs(spec);
    const ConditionReport rep = check_growth_compatibility(
        spec, mrs, {2.0, 4.0, 8.0, 16.0, 32.0, 64.0});
    for (const auto& c : rep.checks) {
      CAPTURE(c.id, c.constant);
      CHECK(c.pass);
    }
  }
}
