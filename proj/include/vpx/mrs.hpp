#pragma once

// Mhaskar-Rakhmanov-Saff numbers a_n for w = exp(-Q): the positive root of
//
//   n = (2/pi) * Int_0^1 a u Q'(a u) (1 - u^2)^{-1/2} du =: G(a).
//
// Gauss-Chebyshev quadrature absorbs the endpoint singularity exactly, and
// G is strictly increasing in a (Q convex), so a safeguarded secant/bisection
// between a grown bracket converges fast.
//
// Derived scaling quantities: delta_n = (n T(a_n))^{-2/3}, the two-branch edge
// profile Phi_n, and phi_n = (a_n / n) Phi_n.

#include <cmath>
#include <map>
#include <vector>

#include "vpx/common.hpp"
#include "vpx/quadrature.hpp"
#include "vpx/weights.hpp"

namespace vpx {

namespace detail {

// G(a) after the Chebyshev change of variables u = sin(phi):
//
//   G(a) = (2/pi) Int_0^{pi/2} a sin(phi) Q'(a sin(phi)) dphi.
//
// The substitution absorbs the (1 - u^2)^{-1/2} endpoint singularity exactly.
// What remains is the |u|^alpha kink at u = 0 (non-smooth for non-integer
// alpha), which plain order-doubling only beats algebraically; geometrically
// graded panels toward phi = 0 resolve it spectrally at every dyadic scale.
// `levels` dyadic panels with `order` Gauss-Legendre points each.
inline double mrs_G_graded(const WeightSpec& spec, double a, int levels,
                           int order) {
  const QuadratureRule& gl = gauss_legendre(order);
  double acc = 0.0;
  double hi = M_PI / 2.0;
  for (int j = 0; j < levels; ++j) {
    const double lo = (j + 1 < levels) ? 0.5 * hi : 0.0;
    const double mid = 0.5 * (lo + hi), hl = 0.5 * (hi - lo);
    double panel = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double phi = mid + hl * gl.x[i];
      const double y = a * std::sin(phi);
      panel += gl.w[i] * y * eval_Q(spec, y).Qp;
    }
    acc += hl * panel;
    hi = lo;
  }
  return acc * 2.0 / M_PI;
}

// quad_order is the nominal node budget (default 200); it sets the per-panel
// Gauss-Legendre order of the graded scheme.
inline double mrs_G(const WeightSpec& spec, double a, int quad_order) {
  const int order = std::max(12, quad_order / 10);
  return mrs_G_graded(spec, a, 42, order);
}

// Independent finer evaluation for post-solve verification.
inline double mrs_G_fine(const WeightSpec& spec, double a, int quad_order) {
  const int order = std::max(12, quad_order / 10) + 12;
  return mrs_G_graded(spec, a, 48, order);
}

}  // namespace detail

// Solve G(a_n) = n for a single n > 0.
inline double mrs_number(const WeightSpec& spec, double n,
                         int quad_order = 200) {
  if (!(n > 0.0)) throw ConfigError("mrs_number: n must be positive");
  spec.validate();

  const double a_cap = 0.995 * max_abs_x(spec);
  auto G = [&](double a) {
    try {
      return detail::mrs_G(spec, a, quad_order);
    } catch (const OverflowError&) {
      return kInf;  // far beyond the root; treated as "too big" by bracketing
    }
  };

  // Bracket from [1, 2]: grow the top (doubling) or shrink the bottom
  // (halving) until G(lo) < n <= G(hi).
  double lo = 1.0, hi = 2.0;
  if (lo > a_cap) { lo = 0.5 * a_cap; hi = a_cap; }
  hi = std::min(hi, a_cap);
  double glo = G(lo), ghi = G(hi);
  while (glo >= n) {
    hi = lo; ghi = glo;
    lo *= 0.5;
    if (lo < 1e-12)
      throw NoBracketError("mrs_number: no lower bracket for n = " +
                           format_double(n));
    glo = G(lo);
  }
  while (ghi < n) {
    if (hi >= a_cap)
      throw NoBracketError(
          "mrs_number: root beyond representable range for n = " +
          format_double(n));
    lo = hi; glo = ghi;
    hi = std::min(hi * 2.0, a_cap);
    ghi = G(hi);
  }

  // Illinois-damped false position. Plain false position stalls here: G is
  // strongly convex for fast-growing Q, so the secant keeps replacing the
  // same endpoint and the other goes stale. Halving the stale ordinate
  // whenever one side is replaced twice running restores superlinear
  // closure; bisection covers brackets with a non-finite endpoint.
  const double tol = 1e-12 * n;
  double root = 0.0;
  bool found = false;
  int last_side = 0;  // -1: lo moved last, +1: hi moved last
  for (int iter = 0; iter < 200 && !found; ++iter) {
    double step_a;
    if (std::isfinite(glo) && std::isfinite(ghi) && ghi > glo) {
      step_a = lo + (n - glo) * (hi - lo) / (ghi - glo);
      if (!(step_a > lo) || !(step_a < hi)) step_a = 0.5 * (lo + hi);
    } else {
      step_a = 0.5 * (lo + hi);
    }
    const double a = step_a;
    const double ga = G(a);
    if (std::abs(ga - n) <= tol) {
      root = a;
      found = true;
      break;
    }
    if (ga < n) {
      lo = a;
      glo = ga;
      if (last_side < 0 && std::isfinite(ghi)) ghi = n + 0.5 * (ghi - n);
      last_side = -1;
    } else {
      hi = a;
      ghi = ga;
      if (last_side > 0 && std::isfinite(glo)) glo = n - 0.5 * (n - glo);
      last_side = +1;
    }
    if ((hi - lo) <= 1e-15 * hi)
      throw ConvergenceError(
          "mrs_number: bracket collapsed before reaching tolerance, n = " +
          format_double(n));
  }
  if (!found)
    throw ConvergenceError(
        "mrs_number: root iteration did not converge for n = " +
        format_double(n));

  // Cross-check the solved root against an independent finer quadrature.
  const double fine = detail::mrs_G_fine(spec, root, quad_order);
  if (std::abs(fine - n) > 1e-11 * n)
    throw ConvergenceError("mrs_number: quadrature verification failed, n = " +
                           format_double(n));
  return root;
}

// Cache of a_n values for one weight. Build single-threaded via ensure() /
// prepare(); lookups through a() are const and lock-free afterwards.
class MrsTable {
 public:
  explicit MrsTable(WeightSpec spec, int quad_order = 200)
      : spec_(std::move(spec)), quad_order_(quad_order) {
    spec_.validate();
  }

  double ensure(double n) {
    auto it = a_.find(n);
    if (it != a_.end()) return it->second;
    const double a = mrs_number(spec_, n, quad_order_);
    a_.emplace(n, a);
    return a;
  }

  // Ensures every n in the list; with_doubles also covers 2n (the edge
  // profile and truncation radii need the doubled entry).
  void prepare(const std::vector<double>& ns, bool with_doubles = true) {
    for (double n : ns) {
      ensure(n);
      if (with_doubles) ensure(2.0 * n);
    }
  }

  bool has(double n) const { return a_.count(n) != 0; }

  double a(double n) const {
    auto it = a_.find(n);
    if (it == a_.end())
      throw DegreeError("MrsTable: a_n not prepared for n = " +
                        format_double(n));
    return it->second;
  }

  const WeightSpec& spec() const { return spec_; }
  int quad_order() const { return quad_order_; }
  const std::map<double, double>& entries() const { return a_; }

 private:
  WeightSpec spec_;
  int quad_order_;
  std::map<double, double> a_;
};

// delta_n = (n T(a_n))^{-2/3}: width scale of the critical strip at the edge.
inline double delta_n(const MrsTable& mrs, double n) {
  const double an = mrs.a(n);
  return std::pow(n * eval_T(mrs.spec(), an), -2.0 / 3.0);
}

// Two-branch edge profile:
//   |x| <= a_n : (1 - |x|/a_{2n}) / sqrt(1 - |x|/a_n + delta_n)
//   |x| >  a_n : frozen at its |x| = a_n value, (1 - a_n/a_{2n}) / sqrt(delta_n)
inline double phi_profile(const MrsTable& mrs, double n, double x) {
  const double an = mrs.a(n);
  const double a2n = mrs.a(2.0 * n);
  const double dn = delta_n(mrs, n);
  const double ax = std::min(std::abs(x), an);
  return (1.0 - ax / a2n) / std::sqrt(1.0 - ax / an + dn);
}

// phi_n = (a_n / n) * Phi_n: the local spacing function.
inline double spacing_fn(const MrsTable& mrs, double n, double x) {
  return mrs.a(n) / n * phi_profile(mrs, n, x);
}

// Empirical check that T(a_n) (a_n/n)^{2/3} stays bounded (the degree-growth
// compatibility condition), plus the declared-class derivative-ratio sup when
// lambda_class is set. Mutates the table (entries are ensured).
inline ConditionReport check_growth_compatibility(
    const WeightSpec& spec, MrsTable& mrs, const std::vector<double>& n_list,
    double slope_gate = 0.05) {
  ConditionReport rep;
  rep.subject = spec.name.empty() ? "weight" : spec.name;
  std::vector<double> c(n_list.size());
  double cmax = -kInf, cmax_n = 0.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const double n = n_list[i];
    const double an = mrs.ensure(n);
    c[i] = eval_T(spec, an) * std::pow(an / n, 2.0 / 3.0);
    if (c[i] > cmax) { cmax = c[i]; cmax_n = n; }
  }
  rep.checks.push_back(
      {"edge_compatibility_sup", std::isfinite(cmax), cmax, cmax_n, ""});
  const double slope = loglog_slope_top_half(n_list, c);
  rep.checks.push_back({"edge_compatibility_slope", slope <= slope_gate, slope,
                        0.0, "log-log slope over top half of n list"});
  if (spec.lambda_class) {
    const double lam = *spec.lambda_class;
    double sup = -kInf, sup_x = 0.0;
    const double hi = std::min(100.0, 0.9 * max_abs_x(spec));
    for (double x : make_log_grid(1.0, hi, 300)) {
      const QDerivatives d = eval_Q(spec, x);
      if (!(d.Q > 0.0)) continue;
      const double r = std::abs(d.Qp) / std::pow(d.Q, lam);
      if (r > sup) { sup = r; sup_x = x; }
    }
    rep.checks.push_back({"declared_class_derivative_ratio",
                          std::isfinite(sup), sup, sup_x,
                          "sup over |x| >= 1 of |Q'| / Q^lambda"});
  }
  return rep;
}

}  // namespace vpx
