#pragma once

// Exponential weights w = exp(-Q) on the real line.
//
// Three families share one parameterization (alpha, u, ell, scale):
//   Freud          Q(x) = |x|^alpha / scale                      (ell = 0, u = 0)
//   FreudGeneral   Q(x) = |x|^(u+alpha) / scale                  (ell = 0)
//   Erdos          Q(x) = |x|^u (exp_ell(|x|^alpha) - exp_ell(0)) / scale
// where exp_ell is the ell-fold iterated exponential. All Q are even, vanish
// at 0, and are convex and increasing on (0, inf) for valid parameters.
//
// T(x) = x Q'(x) / Q(x) measures the relative growth of Q; it is bounded for
// the Freud families (T -> alpha resp. alpha+u) and unbounded for Erdos.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vpx/common.hpp"

namespace vpx {

enum class WeightFamily { Freud, FreudGeneral, Erdos };

struct WeightSpec {
  WeightFamily family = WeightFamily::Freud;
  double alpha = 2.0;
  double u = 0.0;
  int ell = 0;
  double scale = 1.0;
  std::optional<double> lambda_class;  // declared smoothness-class exponent
  std::string name;                    // optional preset label

  // Combined power of |x| governing behaviour near the origin.
  double origin_power() const {
    return family == WeightFamily::Freud ? alpha : alpha + u;
  }

  void validate() const {
    if (!(scale > 0.0)) throw ConfigError("weight spec: scale must be > 0");
    switch (family) {
      case WeightFamily::Freud:
        if (!(alpha > 1.0)) throw ConfigError("Freud weight: alpha must be > 1");
        if (u != 0.0 || ell != 0)
          throw ConfigError("Freud weight: u and ell must be 0");
        break;
      case WeightFamily::FreudGeneral:
        if (ell != 0) throw ConfigError("FreudGeneral weight: ell must be 0");
        if (!(alpha > 0.0) || !(u >= 0.0) || !(alpha + u > 1.0))
          throw ConfigError(
              "FreudGeneral weight: need alpha > 0, u >= 0, alpha + u > 1");
        break;
      case WeightFamily::Erdos:
        if (ell < 1) throw ConfigError("Erdos weight: ell must be >= 1");
        if (!(alpha > 0.0) || !(u >= 0.0) || !(alpha + u > 1.0))
          throw ConfigError(
              "Erdos weight: need alpha > 0, u >= 0, alpha + u > 1");
        break;
    }
    if (lambda_class && !(*lambda_class > 0.0))
      throw ConfigError("weight spec: lambda_class must be > 0");
  }
};

struct QDerivatives {
  double Q;    // Q(x)
  double Qp;   // Q'(x), odd in x
  double Qpp;  // Q''(x), even in x
};

namespace detail {

// Any intermediate above this aborts with OverflowError; leaves headroom for
// the products that follow.
inline constexpr double kOverflowGuard = 1e290;

// Value/first/second derivative of h(s) = exp_ell(s) - exp_ell(0) at s = t,
// with the value built from an expm1 cascade so it stays accurate near t = 0.
struct TowerEval {
  double h, hp, hpp;
};

inline TowerEval iterated_exp_shifted(double t, int ell) {
  double D = t;          // exp_j(t) - exp_j(0), currently j = 0
  double c = 0.0;        // exp_j(0)
  double d1 = 1.0;       // d/dt exp_j(t)
  double d2 = 0.0;       // d^2/dt^2 exp_j(t)
  for (int j = 1; j <= ell; ++j) {
    c = std::exp(c);
    D = c * std::expm1(D);
    const double value = c + D;
    if (!std::isfinite(value) || value > kOverflowGuard)
      throw OverflowError("iterated exponential overflow");
    d2 = value * (d1 * d1 + d2);  // uses the previous level's d1
    d1 = value * d1;
    if (!std::isfinite(d2) || d2 > kOverflowGuard)
      throw OverflowError("iterated exponential derivative overflow");
  }
  return {D, d1, d2};
}

}  // namespace detail

// Q with first and second derivatives (closed form; no finite differences).
inline QDerivatives eval_Q(const WeightSpec& spec, double x) {
  const double ax = std::abs(x);
  const double sgn = (x < 0.0) ? -1.0 : 1.0;
  const double s = spec.scale;

  if (spec.family != WeightFamily::Erdos) {
    const double kappa = spec.origin_power();
    if (ax == 0.0) {
      const double qpp =
          kappa == 2.0 ? 2.0 / s : (kappa > 2.0 ? 0.0 : kInf);
      return {0.0, 0.0, qpp};
    }
    const double q = std::pow(ax, kappa) / s;
    if (!std::isfinite(q) || q > detail::kOverflowGuard)
      throw OverflowError("Q overflow (power family)");
    const double qp = kappa * std::pow(ax, kappa - 1.0) / s;
    const double qpp = kappa * (kappa - 1.0) * std::pow(ax, kappa - 2.0) / s;
    return {q, sgn * qp, qpp};
  }

  // Erdos family.
  if (ax == 0.0) {
    const double kappa = spec.alpha + spec.u;
    double tower_slope = 1.0;  // prod_j exp_j(0) = d/dt exp_ell(t) at t = 0
    double c = 0.0;
    for (int j = 1; j <= spec.ell; ++j) {
      c = std::exp(c);
      tower_slope *= c;
    }
    const double qpp =
        kappa == 2.0 ? 2.0 * tower_slope / s : (kappa > 2.0 ? 0.0 : kInf);
    return {0.0, 0.0, qpp};
  }

  const double t = std::pow(ax, spec.alpha);
  if (!std::isfinite(t) || t > detail::kOverflowGuard)
    throw OverflowError("Q overflow (inner power)");
  const double tp = spec.alpha * std::pow(ax, spec.alpha - 1.0);
  const double tpp =
      spec.alpha * (spec.alpha - 1.0) * std::pow(ax, spec.alpha - 2.0);
  const detail::TowerEval te = detail::iterated_exp_shifted(t, spec.ell);
  // Chain rule through s = |x|^alpha.
  const double h = te.h;
  const double hp = te.hp * tp;
  const double hpp = te.hpp * tp * tp + te.hp * tpp;

  double q, qp, qpp;
  if (spec.u == 0.0) {
    q = h / s;
    qp = hp / s;
    qpp = hpp / s;
  } else {
    const double xu = std::pow(ax, spec.u);
    const double xum1 = std::pow(ax, spec.u - 1.0);
    const double xum2 = std::pow(ax, spec.u - 2.0);
    q = xu * h / s;
    qp = (spec.u * xum1 * h + xu * hp) / s;
    qpp = (spec.u * (spec.u - 1.0) * xum2 * h + 2.0 * spec.u * xum1 * hp +
           xu * hpp) / s;
  }
  if (!std::isfinite(q) || q > detail::kOverflowGuard ||
      !std::isfinite(qpp))
    throw OverflowError("Q overflow (Erdos family)");
  return {q, sgn * qp, qpp};
}

// Limit of T at the origin: alpha for pure Freud, alpha + u otherwise.
inline double T_limit0(const WeightSpec& spec) { return spec.origin_power(); }

// T(x) = x Q'(x) / Q(x). Even; undefined at x = 0 (use T_limit0 for the limit).
// If Q underflows to 0 at tiny |x|, the exact limit value is returned instead
// of a 0/0 NaN.
inline double eval_T(const WeightSpec& spec, double x) {
  if (x == 0.0) throw DomainError("eval_T: x = 0 (use T_limit0)");
  const double ax = std::abs(x);
  const QDerivatives d = eval_Q(spec, ax);
  if (d.Q == 0.0) return T_limit0(spec);
  return ax * d.Qp / d.Q;
}

inline double weight_w(const WeightSpec& spec, double x) {
  // exp underflow for huge Q flushes to 0, which is the intended clamp; a Q
  // past the representable range means w is far below that already.
  try {
    return std::exp(-eval_Q(spec, x).Q);
  } catch (const OverflowError&) {
    return 0.0;
  }
}

inline double weight_w2(const WeightSpec& spec, double x) {
  try {
    return std::exp(-2.0 * eval_Q(spec, x).Q);
  } catch (const OverflowError&) {
    return 0.0;
  }
}

// Largest |x| whose Q-evaluation stays representable (second derivative
// included). Effectively unbounded for the power families; finite for Erdos
// towers. Found by bisection on the overflow predicate.
inline double max_abs_x(const WeightSpec& spec) {
  auto representable = [&](double x) {
    try {
      (void)eval_Q(spec, x);
      return true;
    } catch (const OverflowError&) {
      return false;
    }
  };
  double lo = 1.0;
  if (!representable(lo)) {
    while (lo > 1e-300 && !representable(lo)) lo *= 0.5;
    if (!representable(lo)) throw OverflowError("weight overflows everywhere");
  }
  double hi = lo;
  while (hi < 1e300 && representable(hi)) hi *= 2.0;
  if (hi >= 1e300) return 1e300;
  lo = hi * 0.5;
  for (int i = 0; i < 200 && (hi - lo) > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (representable(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Diagnostic condition checks. These are advisory reports with empirical
// constants and witness points, not hard input validation.
// ---------------------------------------------------------------------------

struct ConditionCheck {
  std::string id;
  bool pass = false;
  double constant = 0.0;   // the empirical constant the check measured
  double witness_x = 0.0;  // where the extremum was attained
  std::string note;
};

struct ConditionReport {
  std::string subject;
  std::vector<ConditionCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ConditionCheck* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
};

// Log-spaced positive grid.
inline std::vector<double> make_log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw ConfigError("make_log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (count - 1.0));
  return g;
}

// Default evaluation grid for condition checks: log-spaced, clear of the
// representable-range ceiling.
inline std::vector<double> condition_grid(const WeightSpec& spec,
                                          int count = 400) {
  const double hi = std::min(100.0, 0.9 * max_abs_x(spec));
  return make_log_grid(1e-3, hi, count);
}

// Empirical verification of the structural class conditions on a grid:
// Q(0) = 0, convexity, growth, the T lower bound and quasi-monotonicity, and
// the two-sided bound on Q'' Q / Q'^2 (lower bound away from a neighbourhood
// J = [-j_radius, j_radius] of the origin).
inline ConditionReport check_class_conditions(const WeightSpec& spec,
                                              const std::vector<double>& grid,
                                              double j_radius = 1.0,
                                              double quasi_incr_cap = 100.0) {
  ConditionReport rep;
  rep.subject = spec.name.empty() ? "weight" : spec.name;

  {
    const double q0 = eval_Q(spec, 0.0).Q;
    rep.checks.push_back({"Q_zero_at_origin", q0 == 0.0, std::abs(q0), 0.0, ""});
  }

  std::vector<double> T(grid.size()), Q(grid.size());
  double min_qpp = kInf, min_qpp_x = 0.0;
  double ratio_hi = -kInf, ratio_hi_x = 0.0;
  double ratio_lo = kInf, ratio_lo_x = 0.0;
  bool monotone = true;
  double mono_x = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const QDerivatives d = eval_Q(spec, x);
    Q[i] = d.Q;
    T[i] = eval_T(spec, x);
    if (d.Qpp < min_qpp) { min_qpp = d.Qpp; min_qpp_x = x; }
    if (i > 0 && !(Q[i] > Q[i - 1])) { monotone = false; mono_x = x; }
    if (d.Qp != 0.0 && d.Q > 0.0) {
      const double r = d.Qpp * d.Q / (d.Qp * d.Qp);
      if (r > ratio_hi) { ratio_hi = r; ratio_hi_x = x; }
      if (x >= j_radius && r < ratio_lo) { ratio_lo = r; ratio_lo_x = x; }
    }
  }

  rep.checks.push_back({"Q_convex", min_qpp > 0.0, min_qpp, min_qpp_x, ""});
  rep.checks.push_back({"Q_increasing", monotone, Q.back(), mono_x,
                        monotone ? "" : "Q not increasing at witness"});

  double lambda_emp = kInf, lambda_x = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (T[i] < lambda_emp) { lambda_emp = T[i]; lambda_x = grid[i]; }
  rep.checks.push_back(
      {"T_lower_bound", lambda_emp > 1.0, lambda_emp, lambda_x, ""});

  // Quasi-increasing constant: max over i <= j of T_i / T_j via a suffix-min.
  {
    double quasi = 0.0, quasi_x = 0.0;
    double suffix_min = kInf;
    for (std::size_t i = grid.size(); i-- > 0;) {
      suffix_min = std::min(suffix_min, T[i]);
      const double c = T[i] / suffix_min;
      if (c > quasi) { quasi = c; quasi_x = grid[i]; }
    }
    rep.checks.push_back({"T_quasi_increasing", quasi < quasi_incr_cap, quasi,
                          quasi_x, ""});
  }

  rep.checks.push_back({"curvature_ratio_upper", std::isfinite(ratio_hi),
                        ratio_hi, ratio_hi_x, ""});
  rep.checks.push_back({"curvature_ratio_lower",
                        std::isfinite(ratio_lo) && ratio_lo > 0.0, ratio_lo,
                        ratio_lo_x, "min over |x| >= j_radius"});
  return rep;
}

// Stability of T under shifts x -> x +- c / T(x): reports the sup and inf of
// the shifted-to-unshifted ratio over the grid.
inline ConditionReport check_T_shift_stability(const WeightSpec& spec,
                                               const std::vector<double>& grid,
                                               double c_shift = 1.0) {
  ConditionReport rep;
  rep.subject = spec.name.empty() ? "weight" : spec.name;
  double sup = -kInf, sup_x = 0.0;
  double inf = kInf, inf_x = 0.0;
  std::size_t skipped = 0;
  for (double x : grid) {
    double tx;
    try {
      tx = eval_T(spec, x);
    } catch (const OverflowError&) {
      ++skipped;
      continue;
    }
    for (double sign : {1.0, -1.0}) {
      const double y = x + sign * c_shift / tx;
      if (!(y > 0.0)) { ++skipped; continue; }
      double ty;
      try {
        ty = eval_T(spec, y);
      } catch (const OverflowError&) {
        ++skipped;
        continue;
      }
      const double ratio = ty / tx;
      if (ratio > sup) { sup = ratio; sup_x = x; }
      if (ratio < inf) { inf = ratio; inf_x = x; }
    }
  }
  const std::string note =
      skipped ? (std::to_string(skipped) + " shifted points skipped") : "";
  rep.checks.push_back({"T_shift_sup", sup < 100.0, sup, sup_x, note});
  rep.checks.push_back({"T_shift_inf", inf > 0.01, inf, inf_x, note});
  return rep;
}

}  // namespace vpx
