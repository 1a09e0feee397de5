#pragma once

// Fourier coefficients, partial sums, and de la Vallee Poussin means.
//
// The VP mean of degree parameter n averages the partial sums s_{n+1}..s_{2n};
// counting how many of those sums contain index k collapses the average to a
// taper in coefficient space:
//
//   v_n(f) = sum_{k < 2n} tau_k c_k p_k,   tau_k = min(n, 2n - k) / n.
//
// The taper form is the computational representation (O(n), exact algebra);
// the literal average is kept as a test oracle. The same taper applied to the
// reproducing kernels gives the averaged kernel V_n(x,t), whose weighted
// absolute integrals (Lebesgue functions) are the exact operator norms of the
// VP map for the sup-type inequalities.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vpx/common.hpp"
#include "vpx/mrs.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/quadrature.hpp"
#include "vpx/weights.hpp"

namespace vpx {

// ---------------------------------------------------------------------------
// Fourier coefficients
// ---------------------------------------------------------------------------

struct ExpansionCoeffs {
  int K = 0;              // number of coefficients
  std::vector<double> c;  // c_0 .. c_{K-1}
};

struct FourierOptions {
  std::vector<double> breakpoints;  // |x| positions of integrand kinks/jumps
  bool f_includes_w = false;        // f already carries one factor of w
  int base_half_panels = 0;         // 0 = auto from K
  int panel_order = 24;
  int max_refinements = 7;
  double refine_tol = 1e-9;   // contract: coefficient change per doubling
  double stop_tol = 1e-12;    // refinement target (margin below contract)
};

namespace detail {

// Panel edges on [0, L]: breakpoints become hard edges, then every gap is
// subdivided to reach at least `half_target` panels overall.
inline std::vector<double> graded_edges(double L,
                                        const std::vector<double>& breaks,
                                        int half_target) {
  std::vector<double> hard = {0.0, L};
  for (double b : breaks) {
    const double ab = std::abs(b);
    if (ab > 1e-14 && ab < L * (1.0 - 1e-14)) hard.push_back(ab);
  }
  std::sort(hard.begin(), hard.end());
  hard.erase(std::unique(hard.begin(), hard.end(),
                         [](double a, double b) {
                           return std::abs(a - b) < 1e-13 * (1.0 + b);
                         }),
             hard.end());
  const double target_h = L / std::max(1, half_target);
  std::vector<double> edges;
  edges.push_back(0.0);
  for (std::size_t i = 0; i + 1 < hard.size(); ++i) {
    const double gap = hard[i + 1] - hard[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(gap / target_h)));
    for (int k = 1; k <= pieces; ++k)
      edges.push_back(hard[i] + gap * k / pieces);
  }
  edges.back() = L;
  return edges;
}

// Mirror a positive-side edge list into a full symmetric rule.
inline QuadratureRule mirrored_rule(const std::vector<double>& edges,
                                    int order) {
  const QuadratureRule right = composite_gauss(edges, order);
  QuadratureRule r;
  const std::size_t m = right.size();
  r.x.resize(2 * m);
  r.w.resize(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    r.x[m - 1 - i] = -right.x[i];
    r.w[m - 1 - i] = right.w[i];
    r.x[m + i] = right.x[i];
    r.w[m + i] = right.w[i];
  }
  return r;
}

}  // namespace detail

// c_k = Int f p_k w^2, k < K, by symmetric panel quadrature truncated to
// |t| <= 1.5 a_{2K}. Panel density doubles until the coefficient vector moves
// by less than stop_tol * ||c||; the refine_tol contract is enforced.
inline ExpansionCoeffs fourier_coeffs(const RecurrenceTable& table,
                                      MrsTable& mrs,
                                      const std::function<double(double)>& f,
                                      int K, const FourierOptions& opts = {}) {
  if (K < 1 || K > table.n_max + 1)
    throw DegreeError("fourier_coeffs: K out of table range");
  const double L = std::min(1.5 * mrs.ensure(2.0 * K), table.disc.L);

  auto pass = [&](int half_target) {
    const QuadratureRule rule = detail::mirrored_rule(
        detail::graded_edges(L, opts.breakpoints, half_target),
        opts.panel_order);
    std::vector<double> c(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = rule.x[i];
      double fw;  // quadrature weight times (f w)(x)
      if (opts.f_includes_w) {
        fw = rule.w[i] * f(x);
      } else {
        const double w = weight_w(table.spec, x);
        if (w == 0.0) continue;
        fw = rule.w[i] * f(x) * w;
      }
      if (fw == 0.0) continue;
      const auto r = eval_polys_weighted(table, x, K);
      for (int k = 0; k < K; ++k)
        c[static_cast<std::size_t>(k)] += fw * r[static_cast<std::size_t>(k)];
    }
    return c;
  };

  int half = opts.base_half_panels > 0 ? opts.base_half_panels
                                       : std::max(16, K / 3);
  std::vector<double> prev = pass(half);
  double last_delta = kInf;
  for (int it = 0; it < opts.max_refinements; ++it) {
    half *= 2;
    std::vector<double> next = pass(half);
    double norm2 = 0.0, delta = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      norm2 += next[k] * next[k];
      delta = std::max(delta, std::abs(next[k] - prev[k]));
    }
    const double scale = std::sqrt(norm2);
    last_delta = (scale > 0.0) ? delta / scale : delta;
    prev = std::move(next);
    if (last_delta <= opts.stop_tol) break;
  }
  if (last_delta > opts.refine_tol)
    throw QuadratureError(
        "fourier_coeffs: refinement stalled at relative delta " +
        format_double(last_delta) + " (supply breakpoints or a finer mesh)");
  ExpansionCoeffs out;
  out.K = K;
  out.c = std::move(prev);
  return out;
}

// ---------------------------------------------------------------------------
// Partial sums and VP means
// ---------------------------------------------------------------------------

inline double partial_sum(const RecurrenceTable& table,
                          const ExpansionCoeffs& coeffs, int m, double x) {
  if (m < 1 || m > coeffs.K)
    throw DegreeError("partial_sum: m out of coefficient range");
  const auto p = eval_polys(table, x, m);
  double acc = 0.0;
  for (int k = 0; k < m; ++k)
    acc += coeffs.c[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
  return acc;
}

struct VpPolynomial {
  int n = 0;
  std::vector<double> d;  // d_0 .. d_{2n-1} in the p_k basis
};

// Taper weights tau_k = min(n, 2n-k)/n for k < 2n.
inline std::vector<double> vp_taper(int n) {
  std::vector<double> tau(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < 2 * n; ++k)
    tau[static_cast<std::size_t>(k)] =
        std::min<double>(n, 2 * n - k) / static_cast<double>(n);
  return tau;
}

inline VpPolynomial vp_mean(const ExpansionCoeffs& coeffs, int n) {
  if (n < 1 || 2 * n > coeffs.K)
    throw DegreeError("vp_mean: need 2n <= K");
  VpPolynomial vp;
  vp.n = n;
  vp.d.resize(static_cast<std::size_t>(2 * n));
  const auto tau = vp_taper(n);
  for (int k = 0; k < 2 * n; ++k)
    vp.d[static_cast<std::size_t>(k)] =
        tau[static_cast<std::size_t>(k)] * coeffs.c[static_cast<std::size_t>(k)];
  return vp;
}

inline double vp_eval(const RecurrenceTable& table, const VpPolynomial& vp,
                      double x) {
  return eval_series(table, vp.d, x);
}

// v_n(f)(x) * w(x), safe at any x.
inline double vp_eval_weighted(const RecurrenceTable& table,
                               const VpPolynomial& vp, double x) {
  return eval_series_weighted(table, vp.d, x);
}

// ---------------------------------------------------------------------------
// Derivative of an expansion, as a coefficient vector one degree shorter.
//
// P' is evaluated on a build-quality rule through the derivative of the
// weighted recurrence (p'_k w = r'_k + Q' r_k, overflow-free) and re-projected
// onto the basis: e_j = sum_i w_i (P' w)(x_i) r_j(x_i).
// ---------------------------------------------------------------------------

inline std::vector<double> series_derivative(const RecurrenceTable& table,
                                             const std::vector<double>& c,
                                             const QuadratureRule& rule) {
  const int m_in = static_cast<int>(c.size());  // degree bound m_in - 1
  if (m_in < 1) throw DegreeError("series_derivative: empty coefficient vector");
  if (m_in - 1 > table.n_max)
    throw DegreeError("series_derivative: table does not support the degree");
  const int m_out = std::max(1, m_in - 1);  // P' has degree <= m_in - 2
  std::vector<double> e(static_cast<std::size_t>(m_out), 0.0);
  std::vector<double> r(static_cast<std::size_t>(m_in)),
      rp(static_cast<std::size_t>(m_in));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.x[i];
    const double w = weight_w(table.spec, x);
    if (w == 0.0) continue;
    const double qp = eval_Q(table.spec, x).Qp;
    r[0] = table.p0 * w;
    rp[0] = -qp * r[0];
    if (m_in > 1) {
      r[1] = x * r[0] / table.beta[1];
      rp[1] = (r[0] + x * rp[0]) / table.beta[1];
      for (int k = 1; k + 1 < m_in; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        r[kk + 1] = (x * r[kk] - table.beta[kk] * r[kk - 1]) / table.beta[kk + 1];
        rp[kk + 1] =
            (r[kk] + x * rp[kk] - table.beta[kk] * rp[kk - 1]) /
            table.beta[kk + 1];
      }
    }
    double dvw = 0.0;  // (P' w)(x)
    for (int k = 0; k < m_in; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      dvw += c[kk] * (rp[kk] + qp * r[kk]);
    }
    const double wi = rule.w[i] * dvw;
    for (int j = 0; j < m_out; ++j)
      e[static_cast<std::size_t>(j)] += wi * r[static_cast<std::size_t>(j)];
  }
  return e;
}

inline std::vector<double> series_derivative(const RecurrenceTable& table,
                                             const std::vector<double>& c) {
  const QuadratureRule rule = make_table_rule(table);
  return series_derivative(table, c, rule);
}

inline std::vector<double> vp_derivative(const RecurrenceTable& table,
                                         const VpPolynomial& vp,
                                         const QuadratureRule& rule) {
  if (2 * vp.n - 1 > table.n_max)
    throw DegreeError("vp_derivative: table does not support degree 2n");
  return series_derivative(table, vp.d, rule);
}

inline std::vector<double> vp_derivative(const RecurrenceTable& table,
                                         const VpPolynomial& vp) {
  const QuadratureRule rule = make_table_rule(table);
  return vp_derivative(table, vp, rule);
}

// ---------------------------------------------------------------------------
// Lebesgue functions: exact sup-type operator norms of the VP map.
//
// V_n(x,t) = (1/n) sum_{j=n+1}^{2n} K_j(x,t) = sum_{k<2n} tau_k p_k(x) p_k(t).
// The weighted kernel W(t) = w(x) w(t) V_n(x,t) is evaluated through the
// weighted recurrence; its sign changes are located by dense sampling plus
// bisection, and |W| integrates exactly segment by segment.
// ---------------------------------------------------------------------------

// Multiplier attached to one side of the kernel: w(x) * T(x)^t_exponent, or
// w(x) * sqrt(Phi_{2n}(x)) when edge_profile is set.
struct SideMult {
  double t_exponent = 0.0;
  bool edge_profile = false;
};

struct LebesgueWeights {
  SideMult outer;  // applied at the evaluation point x
  SideMult inner;  // applied under the t-integral
};

// Default: output damped by T^{-1/4} against plain-weight input.
inline LebesgueWeights damped_output_mode() {
  return {{-0.25, false}, {0.0, false}};
}
// Swapped roles: plain output against T^{1/4}-amplified input (equivalently,
// the inner side carries T^{-1/4}).
inline LebesgueWeights weighted_input_mode() {
  return {{0.0, false}, {-0.25, false}};
}
// Plain-to-plain (growth envelope) and edge-profile variants.
inline LebesgueWeights plain_mode() { return {{0.0, false}, {0.0, false}}; }
inline LebesgueWeights edge_profile_mode() {
  return {{0.0, true}, {0.0, false}};
}

namespace detail {

inline double side_mult_extra(const WeightSpec& spec, const MrsTable& mrs,
                              int n, const SideMult& m, double x) {
  double v = 1.0;
  if (m.edge_profile) v *= std::sqrt(phi_profile(mrs, 2.0 * n, x));
  if (m.t_exponent != 0.0) {
    const double T = (x == 0.0) ? T_limit0(spec) : eval_T(spec, x);
    v *= std::pow(T, m.t_exponent);
  }
  return v;
}

}  // namespace detail

// L_n(x) = outer(x) * Int |V_n(x,t)| inner(t) dt with the w factors of both
// sides folded into the weighted kernel.
inline double vp_lebesgue_function(const RecurrenceTable& table,
                                   const MrsTable& mrs, int n, double x,
                                   const LebesgueWeights& lw =
                                       damped_output_mode()) {
  if (2 * n > table.n_max)
    throw DegreeError("vp_lebesgue_function: need 2n <= n_max");
  const int m = 2 * n;
  const double X = std::min(1.5 * mrs.a(2.0 * n), table.disc.L);
  const auto tau = vp_taper(n);
  const auto rx = eval_polys_weighted(table, x, m);

  std::vector<double> coef(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    coef[static_cast<std::size_t>(k)] =
        tau[static_cast<std::size_t>(k)] * rx[static_cast<std::size_t>(k)];
  auto W = [&](double t) { return eval_series_weighted(table, coef, t); };
  // |W(t)| * inner multiplier; checking W first keeps the multiplier away
  // from the far field where the weight has already flushed to zero.
  auto weighted_abs = [&](double t) {
    const double Wt = W(t);
    if (Wt == 0.0) return 0.0;
    return std::abs(Wt) *
           detail::side_mult_extra(table.spec, mrs, n, lw.inner, t);
  };

  // Sign changes of W on [-X, X]: dense sampling, then bisection.
  const int samples = std::max(257, 16 * n + 1);
  std::vector<double> ts(static_cast<std::size_t>(samples)),
      vs(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    ts[static_cast<std::size_t>(i)] = -X + 2.0 * X * i / (samples - 1.0);
    vs[static_cast<std::size_t>(i)] = W(ts[static_cast<std::size_t>(i)]);
  }
  std::vector<double> breaks;
  breaks.push_back(-X);
  for (int i = 0; i + 1 < samples; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    if (vs[ii] == 0.0) {
      if (ts[ii] > -X) breaks.push_back(ts[ii]);
      continue;
    }
    if (vs[ii] * vs[ii + 1] < 0.0) {
      double lo = ts[ii], hi = ts[ii + 1], flo = vs[ii];
      for (int it = 0; it < 52; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = W(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      breaks.push_back(0.5 * (lo + hi));
    }
  }
  breaks.push_back(X);

  // |W| * inner-extra, segment by segment; segments are chunked so the
  // quadrature never spans more than an oscillation scale.
  const QuadratureRule& gl = gauss_legendre(16);
  const double h_max = 2.0 * X / std::max(64, 4 * n);
  double integral = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (!(b > a)) continue;
    const int chunks =
        std::max(1, static_cast<int>(std::ceil((b - a) / h_max)));
    for (int cch = 0; cch < chunks; ++cch) {
      const double ca = a + (b - a) * cch / chunks;
      const double cb = a + (b - a) * (cch + 1) / chunks;
      const double mid = 0.5 * (ca + cb), hl = 0.5 * (cb - ca);
      double acc = 0.0;
      for (std::size_t i = 0; i < gl.size(); ++i)
        acc += gl.w[i] * weighted_abs(mid + hl * gl.x[i]);
      integral += hl * acc;
    }
  }

  // Geometric tail blocks past X on both sides. The weighted kernel decays
  // super-exponentially and keeps a fixed sign out there (all zeros of the
  // contributing polynomials sit well inside |t| < X), so plain chunked
  // quadrature on |W| is exact in practice; blocks stop once negligible.
  double edge = X;
  for (int j = 0; j < 120; ++j) {
    const double next = edge * 1.3;
    double block = 0.0;
    for (double sign : {1.0, -1.0}) {
      const int chunks = 8;
      for (int cch = 0; cch < chunks; ++cch) {
        const double ca = edge + (next - edge) * cch / chunks;
        const double cb = edge + (next - edge) * (cch + 1) / chunks;
        const double mid = 0.5 * (ca + cb), hl = 0.5 * (cb - ca);
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.size(); ++i)
          acc += gl.w[i] * weighted_abs(sign * (mid + hl * gl.x[i]));
        block += hl * acc;
      }
    }
    integral += block;
    if (block <= 1e-13 * std::max(integral, 1e-300)) break;
    edge = next;
  }
  return detail::side_mult_extra(table.spec, mrs, n, lw.outer, x) * integral;
}

struct OperatorNormResult {
  double value = 0.0;
  double argmax = 0.0;
};

// sup_x L_n(x), exploiting evenness (the scan runs over x >= 0). Grid scan
// over a uniform ladder plus windows at the edge scales, followed by local
// golden-section refinement of the best candidates so the reported sup is
// grid-independent.
inline OperatorNormResult vp_operator_norm(const RecurrenceTable& table,
                                           const MrsTable& mrs, int n,
                                           const LebesgueWeights& lw =
                                               damped_output_mode(),
                                           int uniform_points = 384,
                                           int window_points = 65) {
  const double an = mrs.a(n), a2n = mrs.a(2.0 * n);
  const double dn = delta_n(mrs, n);
  const double X = std::min(1.5 * a2n, table.disc.L);
  std::vector<double> grid;
  for (int i = 0; i <= uniform_points; ++i)
    grid.push_back(X * i / static_cast<double>(uniform_points));
  for (double center : {an, a2n}) {
    const double half = 4.0 * dn * center;
    for (int i = 0; i <= window_points; ++i) {
      const double x = center - half + 2.0 * half * i / window_points;
      if (x >= 0.0 && x <= X) grid.push_back(x);
    }
  }
  grid.push_back(an);
  grid.push_back(std::min(a2n, X));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    vals[i] = vp_lebesgue_function(table, mrs, n, grid[i], lw);

  // Top local maxima as refinement candidates.
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool up = (i == 0) || vals[i] >= vals[i - 1];
    const bool down = (i + 1 == grid.size()) || vals[i] >= vals[i + 1];
    if (up && down) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(),
            [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  if (cand.size() > 6) cand.resize(6);

  OperatorNormResult best;
  for (std::size_t idx : cand) {
    double lo = (idx == 0) ? grid[0] : grid[idx - 1];
    double hi = (idx + 1 == grid.size()) ? grid.back() : grid[idx + 1];
    // Golden-section ascent on the bracketing interval.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = vp_lebesgue_function(table, mrs, n, c1, lw);
    double f2 = vp_lebesgue_function(table, mrs, n, c2, lw);
    for (int it = 0; it < 40 && (hi - lo) > 1e-10 * (1.0 + hi); ++it) {
      if (f1 < f2) {
        lo = c1; c1 = c2; f1 = f2;
        c2 = lo + gr * (hi - lo);
        f2 = vp_lebesgue_function(table, mrs, n, c2, lw);
      } else {
        hi = c2; c2 = c1; f2 = f1;
        c1 = hi - gr * (hi - lo);
        f1 = vp_lebesgue_function(table, mrs, n, c1, lw);
      }
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = vp_lebesgue_function(table, mrs, n, xm, lw);
    if (fm > best.value) { best.value = fm; best.argmax = xm; }
  }
  return best;
}

}  // namespace vpx
