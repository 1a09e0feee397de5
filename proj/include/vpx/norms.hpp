#pragma once

// Weighted L^p norms on the line and degrees of approximation.
//
// Every norm here is of the form || g * M ||_p with multiplier
// M = w * T^q (or T^q alone when the caller's evaluator already carries the
// weight). Finite p integrates |g M|^p over a breakpoint-aware symmetric
// panel mesh, doubles the mesh until the value is stable, and then certifies
// the tail by direct block integration out to where the weight flushes to
// zero -- decay is verified, never assumed. p = infinity takes a sup over a
// composite grid (uniform plus windows at the critical-strip edges) with the
// same doubling contract, then scans the tail for hidden growth.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vpx/common.hpp"
#include "vpx/mrs.hpp"
#include "vpx/operators.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/quadrature.hpp"
#include "vpx/weights.hpp"

namespace vpx {

// The three multiplier shapes used by the inequalities under test.
enum class WeightMode { Plain, DampedQuarter, AmplifiedQuarter };

inline double weight_mode_exponent(WeightMode m) {
  switch (m) {
    case WeightMode::Plain: return 0.0;
    case WeightMode::DampedQuarter: return -0.25;
    case WeightMode::AmplifiedQuarter: return 0.25;
  }
  throw ConfigError("weight_mode_exponent: unknown mode");
}

inline WeightMode weight_mode_from_name(const std::string& s) {
  if (s == "w") return WeightMode::Plain;
  if (s == "w_over_T4") return WeightMode::DampedQuarter;
  if (s == "T4_w") return WeightMode::AmplifiedQuarter;
  throw ConfigError("weight mode must be one of w, w_over_T4, T4_w (got \"" +
                    s + "\")");
}

inline const char* weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::Plain: return "w";
    case WeightMode::DampedQuarter: return "w_over_T4";
    case WeightMode::AmplifiedQuarter: return "T4_w";
  }
  throw ConfigError("weight_mode_name: unknown mode");
}

struct NormRequest {
  double p = 2.0;            // in [1, inf]; pass kInf for the sup norm
  double t_exponent = 0.0;   // multiplier w * T^q; see weight_mode_exponent
  bool g_includes_w = false; // g already carries the factor of w
  double L = 0.0;            // 0 = derive from n_ctx as 1.5 a_{2 n_ctx}
  double n_ctx = 0.0;        // degree context: domain + sup-grid windows
  std::vector<double> breakpoints;  // |x| kink/jump positions of g

  int base_half_panels = 32;
  int panel_order = 16;
  int max_refinements = 8;
  double refine_tol = 1e-6;  // stability contract per grid doubling

  int inf_uniform = 4096;    // uniform sup-grid points on [-L, L]
  int inf_window = 256;      // extra points per edge window
};

struct NormResult {
  double value = 0.0;
  double body = 0.0;          // contribution from [-L, L] (p-th power mass,
                              // or the grid sup for p = infinity)
  double tail = 0.0;          // certified contribution beyond |x| = L
  double refine_delta = 0.0;  // relative change at the last grid doubling
  double domain_L = 0.0;
  double argmax = 0.0;        // where the sup was attained (p = infinity only)
};

namespace detail {

// g(x) * w^{0|1}(x) * T(x)^q (signed; the multiplier is positive), with the
// weight factor short-circuiting the far field and a finiteness check that
// catches missing weight factors.
inline double norm_sample_signed(const WeightSpec& spec,
                                 const std::function<double(double)>& g,
                                 const NormRequest& req, double x) {
  double val;
  if (req.g_includes_w) {
    val = g(x);
  } else {
    const double w = weight_w(spec, x);
    if (w == 0.0) return 0.0;
    val = g(x) * w;
  }
  if (val == 0.0) return 0.0;
  if (req.t_exponent != 0.0) {
    const double T = (x == 0.0) ? T_limit0(spec) : eval_T(spec, x);
    val *= std::pow(T, req.t_exponent);
  }
  if (!std::isfinite(val))
    throw NumericError("weighted_norm: integrand not finite at x = " +
                       format_double(x) + " (missing weight factor?)");
  return val;
}

}  // namespace detail

inline NormResult weighted_norm(const WeightSpec& spec, MrsTable& mrs,
                                const std::function<double(double)>& g,
                                const NormRequest& req) {
  if (!(req.p >= 1.0)) throw ConfigError("weighted_norm: p must be >= 1");
  double L = req.L;
  if (L <= 0.0) {
    if (req.n_ctx < 1.0)
      throw ConfigError("weighted_norm: automatic domain needs n_ctx >= 1");
    L = 1.5 * mrs.ensure(2.0 * req.n_ctx);
  }
  L = std::min(L, 0.995 * max_abs_x(spec));
  if (req.n_ctx >= 1.0) {
    mrs.ensure(req.n_ctx);
    mrs.ensure(2.0 * req.n_ctx);
  }

  auto sample = [&](double x) {
    return std::abs(detail::norm_sample_signed(spec, g, req, x));
  };

  NormResult out;
  out.domain_L = L;
  const QuadratureRule& gl = gauss_legendre(16);

  if (req.p == kInf) {
    // --- sup norm: composite grid with doubling stability -----------------
    double sup_seen = 0.0, arg_seen = 0.0;
    auto sup_pass = [&](int uniform, int window) {
      double best = 0.0;
      auto consider = [&](double x) {
        const double v = sample(x);
        best = std::max(best, v);
        if (v > sup_seen) {
          sup_seen = v;
          arg_seen = x;
        }
      };
      for (int i = 0; i <= uniform; ++i) consider(-L + 2.0 * L * i / uniform);
      if (req.n_ctx >= 1.0) {
        for (double m : {req.n_ctx, 2.0 * req.n_ctx}) {
          const double am = mrs.a(m);
          const double dm = delta_n(mrs, m);
          const double lo = am * (1.0 - dm), hi = am * (1.0 + dm);
          for (int i = 0; i <= window; ++i) {
            const double x = lo + (hi - lo) * i / window;
            if (std::abs(x) <= L) {
              consider(x);
              consider(-x);
            }
          }
        }
      }
      return best;
    };
    int uniform = req.inf_uniform, window = req.inf_window;
    double sup = sup_pass(uniform, window);
    double delta = kInf;
    for (int it = 0; it < req.max_refinements; ++it) {
      uniform *= 2;
      window *= 2;
      const double next = sup_pass(uniform, window);
      delta = std::abs(next - sup) / std::max(next, 1e-300);
      sup = std::max(sup, next);
      if (delta <= 0.1 * req.refine_tol) break;
    }
    if (delta > req.refine_tol)
      throw QuadratureError("weighted_norm: sup grid not stable, delta = " +
                            format_double(delta));
    out.body = sup;
    out.refine_delta = delta;

    // Tail scan: geometric blocks past L must decay, not grow.
    double edge = L, prev_block = kInf, tail_arg = L;
    int growing = 0;
    for (int j = 0; j < 400; ++j) {
      const double next = edge * 1.3;
      double block = 0.0;
      for (int i = 0; i < 16; ++i) {
        const double x = edge + (next - edge) * (i + 0.5) / 16.0;
        for (double xs : {x, -x}) {
          const double v = sample(xs);
          block = std::max(block, v);
          if (v > out.tail) {
            out.tail = v;
            tail_arg = xs;
          }
        }
      }
      if (block > prev_block * (1.0 + 1e-12) &&
          block > 1e-9 * std::max(sup, 1e-300)) {
        if (++growing >= 2)
          throw UnboundedError(
              "weighted_norm: values still growing past |x| = " +
              format_double(edge) + " (missing weight factor?)");
      } else {
        growing = 0;
      }
      if (block <= 1e-9 * std::max({sup, out.tail, 1e-300})) break;
      prev_block = block;
      edge = next;
    }
    out.value = std::max(out.body, out.tail);
    out.argmax = (out.tail > out.body) ? tail_arg : arg_seen;
    return out;
  }

  // --- finite p: panel mass + certified tail blocks -----------------------
  // |g M|^p has kinks wherever g changes sign (felt hardest at p = 1), so
  // each pass records the sign changes it saw and the next pass turns them
  // into hard panel edges; smooth pieces then converge spectrally.
  std::vector<double> zero_hints;
  auto mass_pass = [&](int half) {
    std::vector<double> edges = req.breakpoints;
    edges.insert(edges.end(), zero_hints.begin(), zero_hints.end());
    const QuadratureRule rule = detail::mirrored_rule(
        detail::graded_edges(L, edges, half), req.panel_order);
    double mass = 0.0;
    std::vector<double> zeros;
    double prev_x = 0.0, prev_sig = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double s = detail::norm_sample_signed(spec, g, req, rule.x[i]);
      const double h = std::abs(s);
      if (h > 0.0) mass += rule.w[i] * std::pow(h, req.p);
      if (s != 0.0) {
        if (prev_sig != 0.0 && (s < 0.0) != (prev_sig < 0.0) &&
            zeros.size() < 1024)
          zeros.push_back(0.5 * (prev_x + rule.x[i]));
        prev_sig = s;
        prev_x = rule.x[i];
      }
    }
    zero_hints = std::move(zeros);
    return mass;
  };
  int half = req.base_half_panels;
  double body = mass_pass(half);
  double delta = kInf;
  for (int it = 0; it < req.max_refinements; ++it) {
    half *= 2;
    const double next = mass_pass(half);
    delta = std::abs(std::pow(next, 1.0 / req.p) - std::pow(body, 1.0 / req.p)) /
            std::max(std::pow(next, 1.0 / req.p), 1e-300);
    body = next;
    if (delta <= 0.1 * req.refine_tol) break;
  }
  if (delta > req.refine_tol)
    throw QuadratureError("weighted_norm: panel mesh not stable, delta = " +
                          format_double(delta));
  out.body = body;
  out.refine_delta = delta;

  double edge = L, prev_block = kInf;
  int growing = 0;
  bool certified = false;
  for (int j = 0; j < 400; ++j) {
    const double next = edge * 1.3;
    double block = 0.0;
    for (double sign : {1.0, -1.0}) {
      const int chunks = 8;
      for (int cch = 0; cch < chunks; ++cch) {
        const double ca = edge + (next - edge) * cch / chunks;
        const double cb = edge + (next - edge) * (cch + 1) / chunks;
        const double mid = 0.5 * (ca + cb), hl = 0.5 * (cb - ca);
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.size(); ++i) {
          const double h = sample(sign * (mid + hl * gl.x[i]));
          if (h > 0.0) acc += gl.w[i] * std::pow(h, req.p);
        }
        block += hl * acc;
      }
    }
    out.tail += block;
    const double total = std::max(out.body + out.tail, 1e-300);
    if (block > prev_block * (1.0 + 1e-12) && block > 1e-13 * total) {
      if (++growing >= 2)
        throw UnboundedError("weighted_norm: tail mass growing past |x| = " +
                             format_double(edge) +
                             " (missing weight factor?)");
    } else {
      growing = 0;
    }
    if (block <= 1e-14 * total) {
      certified = true;
      break;
    }
    prev_block = block;
    edge = next;
  }
  if (!certified)
    throw UnboundedError("weighted_norm: tail failed to decay within the "
                         "block budget");
  out.value = std::pow(out.body + out.tail, 1.0 / req.p);
  return out;
}

// ---------------------------------------------------------------------------
// Degree of approximation E_{p,n} = inf_{P of degree < n} || (f - P) w ||_p.
// ---------------------------------------------------------------------------

struct ApproxError {
  double value = 0.0;
  bool upper_bound_only = false;  // p != 2: candidate projections, not the inf
  bool tail_suspect = false;      // last coefficient still carries tail mass
};

// p = 2 is exact by Parseval: the projection onto span{p_0..p_{n-1}} is the
// minimizer and the error is the coefficient tail.
inline ApproxError best_approx_error2(const ExpansionCoeffs& coeffs, int n) {
  if (n < 0) throw ConfigError("best_approx_error: n must be >= 0");
  if (coeffs.K < std::max(1, 4 * n))
    throw TailError("best_approx_error: tail accuracy needs K >= 4n");
  double tail = 0.0;
  for (int k = n; k < coeffs.K; ++k)
    tail += sqr(coeffs.c[static_cast<std::size_t>(k)]);
  ApproxError out;
  out.value = std::sqrt(tail);
  const double last = sqr(coeffs.c[static_cast<std::size_t>(coeffs.K - 1)]);
  out.tail_suspect = tail > 0.0 && last > 1e-3 * tail;
  return out;
}

// General p: exact for p = 2; otherwise the better of the degree-n partial
// sum and the half-degree VP mean, reported as a flagged upper bound.
inline ApproxError best_approx_error(const RecurrenceTable& table,
                                     MrsTable& mrs,
                                     const ExpansionCoeffs& coeffs,
                                     const std::function<double(double)>& f,
                                     bool f_includes_w, int n, double p,
                                     const std::vector<double>& breakpoints =
                                         {}) {
  if (p == 2.0) return best_approx_error2(coeffs, n);
  if (n < 1) throw ConfigError("best_approx_error: n must be >= 1");
  if (coeffs.K < 4 * n)
    throw TailError("best_approx_error: tail accuracy needs K >= 4n");

  auto fw = [&](double x) -> double {
    if (f_includes_w) return f(x);
    const double w = weight_w(table.spec, x);
    return w == 0.0 ? 0.0 : f(x) * w;
  };

  std::vector<std::vector<double>> candidates;
  candidates.emplace_back(coeffs.c.begin(), coeffs.c.begin() + n);
  if (n / 2 >= 1) candidates.push_back(vp_mean(coeffs, n / 2).d);

  NormRequest req;
  req.p = p;
  req.g_includes_w = true;
  req.n_ctx = coeffs.K / 2.0;
  req.breakpoints = breakpoints;

  ApproxError out;
  out.upper_bound_only = true;
  out.value = kInf;
  for (const auto& cand : candidates) {
    auto g = [&](double x) {
      return fw(x) - eval_series_weighted(table, cand, x);
    };
    out.value = std::min(out.value,
                         weighted_norm(table.spec, mrs, g, req).value);
  }
  const ApproxError exact2 = best_approx_error2(coeffs, n);
  out.tail_suspect = exact2.tail_suspect;
  return out;
}

}  // namespace vpx
