#pragma once

// Built-in target functions for the approximation and ratio experiments:
// bounded test signals with known smoothness, kink/jump positions, and
// (where available) closed-form derivatives. The harness draws on a fixed
// dictionary of these; the CLI parses "builtin:..." descriptors into them.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "vpx/common.hpp"
#include "vpx/weights.hpp"

namespace vpx {

// A target f paired with what the experiments need to know about it: an
// exact derivative when f is C^1, and the |x| positions of kinks or jumps so
// quadrature panels can be aligned with them. Both 0 and the domain edge are
// always panel edges, so piecewise-smooth targets only list interior breaks.
struct TargetFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;  // set iff smooth
  bool smooth = false;
  std::function<std::vector<double>(double)> breakpoints_to;  // up to |x| = L

  std::vector<double> kinks(double L) const {
    return breakpoints_to ? breakpoints_to(L) : std::vector<double>{};
  }
};

inline TargetFunction target_sin() {
  TargetFunction t;
  t.name = "sin";
  t.f = [](double x) { return std::sin(x); };
  t.df = [](double x) { return std::cos(x); };
  t.smooth = true;
  return t;
}

inline TargetFunction target_cos() {
  TargetFunction t;
  t.name = "cos";
  t.f = [](double x) { return std::cos(x); };
  t.df = [](double x) { return -std::sin(x); };
  t.smooth = true;
  return t;
}

// |x|: the kink sits at the mirror point 0, which every panel layout already
// honors, so no extra breakpoints are listed.
inline TargetFunction target_abs() {
  TargetFunction t;
  t.name = "abs";
  t.f = [](double x) { return std::abs(x); };
  return t;
}

// sign(sin 3x): a bounded square wave with jumps at multiples of pi/3.
inline TargetFunction target_sign() {
  TargetFunction t;
  t.name = "sign";
  t.f = [](double x) {
    const double s = std::sin(3.0 * x);
    return (s > 0.0) ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
  };
  t.breakpoints_to = [](double L) {
    std::vector<double> b;
    const double step = M_PI / 3.0;
    for (double x = step; x < L; x += step) b.push_back(x);
    return b;
  };
  return t;
}

inline TargetFunction target_runge() {
  TargetFunction t;
  t.name = "runge";
  t.f = [](double x) { return 1.0 / (1.0 + 25.0 * x * x); };
  t.df = [](double x) {
    const double d = 1.0 + 25.0 * x * x;
    return -50.0 * x / (d * d);
  };
  t.smooth = true;
  return t;
}

inline TargetFunction target_gauss_bump(double center, double width) {
  if (!(width > 0.0)) throw ConfigError("gauss-bump: width must be positive");
  TargetFunction t;
  t.name = "gauss-bump(" + format_double(center) + "," +
           format_double(width) + ")";
  const double c = center, s = width;
  t.f = [c, s](double x) {
    const double u = (x - c) / s;
    return std::exp(-0.5 * u * u);
  };
  t.df = [c, s](double x) {
    const double u = (x - c) / s;
    return -(u / s) * std::exp(-0.5 * u * u);
  };
  t.smooth = true;
  return t;
}

// Polynomial in the monomial basis (Horner). Unbounded, but every use site
// pairs it with the weight, which wins in the far field.
inline TargetFunction target_poly(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw ConfigError("poly: needs at least one coefficient");
  TargetFunction t;
  t.name = "poly(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) t.name += ",";
    t.name += format_double(coeffs[i]);
  }
  t.name += ")";
  const std::vector<double> c = coeffs;
  t.f = [c](double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  };
  t.df = [c](double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * x + c[i] * double(i);
    return v;
  };
  t.smooth = true;
  return t;
}

// Indicator of [a, b): discontinuous, breaks at both endpoints.
inline TargetFunction target_characteristic(double a, double b) {
  if (!(a < b)) throw ConfigError("characteristic: needs a < b");
  TargetFunction t;
  t.name = "characteristic(" + format_double(a) + "," + format_double(b) + ")";
  t.f = [a, b](double x) { return (x >= a && x < b) ? 1.0 : 0.0; };
  t.breakpoints_to = [a, b](double) { return std::vector<double>{a, b}; };
  return t;
}

// Clamped reciprocal weight, f = min(cap, 1/w): the stress member of the
// ratio dictionary. It grows as fast against w as any bounded-norm input can,
// with kinks where the clamp engages (Q = log cap, found by bisection).
inline TargetFunction target_winv_clamped(const WeightSpec& spec,
                                          double cap = 1e6) {
  if (!(cap > 1.0)) throw ConfigError("winv: cap must exceed 1");
  TargetFunction t;
  t.name = "winv";
  const WeightSpec s = spec;
  t.f = [s, cap](double x) {
    const double w = weight_w(s, x);
    return (w > 1.0 / cap) ? 1.0 / w : cap;
  };
  const double logcap = std::log(cap);
  t.breakpoints_to = [s, logcap](double L) -> std::vector<double> {
    double hi = 1.0;
    while (eval_Q(s, hi).Q < logcap) {
      hi *= 2.0;
      if (hi > max_abs_x(s)) return {};
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval_Q(s, mid).Q < logcap ? lo : hi) = mid;
    }
    const double xc = 0.5 * (lo + hi);
    if (xc < L) return {xc};
    return {};
  };
  return t;
}

// ---------------------------------------------------------------------------
// Fixed dictionaries used by the experiments.
// ---------------------------------------------------------------------------

// Ratio dictionary at degree context n: fixed shapes plus bumps pinned to the
// scale point a_n, where edge effects concentrate.
inline std::vector<TargetFunction> ratio_dictionary(const WeightSpec& spec,
                                                    double a_n) {
  std::vector<TargetFunction> d;
  d.push_back(target_sin());
  d.push_back(target_cos());
  d.push_back(target_abs());
  d.push_back(target_sign());
  d.push_back(target_runge());
  d.push_back(target_gauss_bump(0.0, 1.0));
  TargetFunction mid = target_gauss_bump(0.5 * a_n, 1.0);
  mid.name = "gauss-bump@a/2";
  d.push_back(mid);
  TargetFunction edge = target_gauss_bump(a_n, 1.0);
  edge.name = "gauss-bump@a";
  d.push_back(edge);
  d.push_back(target_winv_clamped(spec));
  return d;
}

// Convergence sweep targets: one analytic, one kinked, one peaked.
inline std::vector<TargetFunction> convergence_targets() {
  return {target_sin(), target_abs(), target_runge()};
}

// Smooth targets with exact derivatives, for first-order error bounds.
inline std::vector<TargetFunction> smooth_targets() {
  return {target_sin(), target_gauss_bump(0.0, 1.0), target_runge()};
}

// ---------------------------------------------------------------------------
// CLI descriptor parsing: "builtin:NAME" or "builtin:NAME(arg1,arg2,...)".
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> parse_args(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string tok = s.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError(what + ": bad numeric argument '" + tok + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline TargetFunction parse_target(const std::string& desc,
                                   const WeightSpec& spec) {
  const std::string prefix = "builtin:";
  if (desc.rfind(prefix, 0) != 0)
    throw ConfigError("target descriptor must start with 'builtin:', got '" +
                      desc + "'");
  std::string body = desc.substr(prefix.size());
  std::string name = body, args;
  const std::size_t lp = body.find('(');
  if (lp != std::string::npos) {
    if (body.back() != ')')
      throw ConfigError("target descriptor: missing ')' in '" + desc + "'");
    name = body.substr(0, lp);
    args = body.substr(lp + 1, body.size() - lp - 2);
  }
  if (name == "sin") return target_sin();
  if (name == "cos") return target_cos();
  if (name == "abs") return target_abs();
  if (name == "sign") return target_sign();
  if (name == "runge") return target_runge();
  if (name == "winv") return target_winv_clamped(spec);
  if (name == "gauss-bump") {
    if (args.empty()) return target_gauss_bump(0.0, 1.0);
    const auto a = detail::parse_args(args, "gauss-bump");
    if (a.size() != 2)
      throw ConfigError("gauss-bump: expects (center,width)");
    return target_gauss_bump(a[0], a[1]);
  }
  if (name == "poly")
    return target_poly(detail::parse_args(args, "poly"));
  if (name == "characteristic") {
    const auto a = detail::parse_args(args, "characteristic");
    if (a.size() != 2)
      throw ConfigError("characteristic: expects (a,b)");
    return target_characteristic(a[0], a[1]);
  }
  throw ConfigError("unknown builtin target: '" + name + "'");
}

}  // namespace vpx
