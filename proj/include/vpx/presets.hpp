#pragma once

// Shipped weight presets. Names are stable identifiers used by the CLI,
// the experiment harness, and the test suite.

#include <vector>

#include "vpx/common.hpp"
#include "vpx/weights.hpp"

namespace vpx {

inline std::vector<WeightSpec> shipped_presets() {
  std::vector<WeightSpec> out;
  {
    // w = exp(-x^2/2): the classical Hermite setting (w^2 = exp(-x^2)).
    WeightSpec s;
    s.family = WeightFamily::Freud;
    s.alpha = 2.0;
    s.scale = 2.0;
    s.lambda_class = 0.5;  // (alpha - 1) / alpha
    s.name = "freud-hermite";
    out.push_back(s);
  }
  {
    WeightSpec s;
    s.family = WeightFamily::Freud;
    s.alpha = 2.0;
    s.scale = 1.0;
    s.lambda_class = 0.5;
    s.name = "freud-x2";
    out.push_back(s);
  }
  {
    // Slow polynomial growth; exercises the non-integer-exponent quadrature.
    WeightSpec s;
    s.family = WeightFamily::Freud;
    s.alpha = 1.5;
    s.scale = 1.0;
    s.lambda_class = 1.0 / 3.0;
    s.name = "freud-x15";
    out.push_back(s);
  }
  {
    WeightSpec s;
    s.family = WeightFamily::Freud;
    s.alpha = 4.0;
    s.scale = 1.0;
    s.lambda_class = 0.75;
    s.name = "freud-x4";
    out.push_back(s);
  }
  {
    // Q(x) = |x| (exp(|x|) - 1): unbounded T, single exponential level.
    WeightSpec s;
    s.family = WeightFamily::Erdos;
    s.alpha = 1.0;
    s.u = 1.0;
    s.ell = 1;
    s.scale = 1.0;
    s.lambda_class = 1.0;
    s.name = "erdos-1";
    out.push_back(s);
  }
  return out;
}

inline WeightSpec preset(const std::string& name) {
  for (const auto& s : shipped_presets())
    if (s.name == name) return s;
  throw ConfigError("unknown preset: " + name);
}

}  // namespace vpx
