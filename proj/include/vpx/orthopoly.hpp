#pragma once

// Orthonormal polynomials p_k for the measure w^2 dx, w = exp(-Q).
//
// Symmetry of w^2 forces the three-term recurrence to the pure form
//   x p_k = b_{k+1} p_{k+1} + b_k p_{k-1},
// i.e. every alpha_k vanishes. The b_k are produced by a discretized
// Stieltjes procedure: Lanczos with full (two-pass) reorthogonalization on
// diag(x_i) with start vector sqrt(rho_i), rho_i = quadrature weight times
// w^2(x_i), over a symmetric composite Gauss-Legendre rule on [-L, L]. Panel
// density doubles until the coefficients are refinement-stable.
//
// Far from the origin the raw p_k overflow while p_k * w stays bounded, so a
// parallel "weighted" recurrence for r_k = p_k * w (and its derivative) is
// the primary evaluation path for everything norm- or kernel-like.

#include <cmath>
#include <vector>

#include "vpx/common.hpp"
#include "vpx/mrs.hpp"
#include "vpx/quadrature.hpp"
#include "vpx/weights.hpp"

namespace vpx {

struct Discretization {
  double L = 0.0;     // truncation radius of the build rule
  int half_panels = 0;
  int order = 0;      // Gauss-Legendre points per panel
  std::size_t nodes = 0;
};

struct RecurrenceTable {
  WeightSpec spec;
  int n_max = 0;
  double p0 = 0.0;            // the constant polynomial p_0
  std::vector<double> alpha;  // size n_max + 1; identically zero by symmetry
  std::vector<double> beta;   // size n_max + 1; beta[0] unused (= 0)
  Discretization disc;
};

struct BuildOptions {
  int order = 24;              // GL points per panel
  int max_refinements = 6;     // panel-density doublings allowed
  double stability_tol = 1e-10;
  int quad_order = 200;        // for MRS solves triggered here
};

namespace detail {

struct StieltjesResult {
  std::vector<double> beta;
  double p0 = 0.0;
  std::size_t nodes = 0;
};

inline StieltjesResult stieltjes_pass(const WeightSpec& spec, double L,
                                      int half_panels, int order, int n_max) {
  const QuadratureRule rule = symmetric_panels(L, half_panels, order);
  std::vector<double> xs, rho;
  xs.reserve(rule.size());
  rho.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.w[i] * weight_w2(spec, rule.x[i]);
    if (r > 0.0) {  // underflowed far-field nodes carry no mass; drop them
      xs.push_back(rule.x[i]);
      rho.push_back(r);
    }
  }
  const std::size_t m = xs.size();
  if (m < static_cast<std::size_t>(2 * (n_max + 1)))
    throw DiscretizationError("stieltjes: too few carrying nodes for degree " +
                              std::to_string(n_max));
  double mu0 = 0.0;
  for (double r : rho) mu0 += r;
  if (!(mu0 > 0.0)) throw DiscretizationError("stieltjes: measure underflow");

  std::vector<std::vector<double>> psi;
  psi.reserve(static_cast<std::size_t>(n_max) + 1);
  {
    std::vector<double> p(m);
    const double inv = 1.0 / std::sqrt(mu0);
    for (std::size_t i = 0; i < m; ++i) p[i] = std::sqrt(rho[i]) * inv;
    psi.push_back(std::move(p));
  }

  StieltjesResult out;
  out.beta.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.p0 = 1.0 / std::sqrt(mu0);
  out.nodes = m;

  std::vector<double> v(m);
  for (int k = 0; k < n_max; ++k) {
    const std::vector<double>& cur = psi[static_cast<std::size_t>(k)];
    if (k > 0) {
      const std::vector<double>& prev = psi[static_cast<std::size_t>(k - 1)];
      const double bk = out.beta[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < m; ++i) v[i] = xs[i] * cur[i] - bk * prev[i];
    } else {
      for (std::size_t i = 0; i < m; ++i) v[i] = xs[i] * cur[i];
    }
    // Full reorthogonalization, two passes ("twice is enough").
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : psi) {
        double dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) dot += v[i] * q[i];
        for (std::size_t i = 0; i < m; ++i) v[i] -= dot * q[i];
      }
    }
    double nrm = 0.0;
    for (double vi : v) nrm += vi * vi;
    nrm = std::sqrt(nrm);
    if (!(nrm > 1e-140))
      throw DiscretizationError(
          "stieltjes: vanishing recurrence coefficient at k = " +
          std::to_string(k + 1));
    out.beta[static_cast<std::size_t>(k + 1)] = nrm;
    std::vector<double> next(m);
    const double inv = 1.0 / nrm;
    for (std::size_t i = 0; i < m; ++i) next[i] = v[i] * inv;
    psi.push_back(std::move(next));
  }
  return out;
}

}  // namespace detail

// Build the recurrence table for degrees 0..n_max. Mutates the MRS table
// (a_{2 n_max} is ensured to size the truncation radius).
inline RecurrenceTable build_recurrence(const WeightSpec& spec, MrsTable& mrs,
                                        int n_max,
                                        const BuildOptions& opts = {}) {
  if (n_max < 1) throw ConfigError("build_recurrence: n_max must be >= 1");
  spec.validate();
  const double a2 = mrs.ensure(2.0 * n_max);
  const double L = std::min(1.5 * a2, 0.995 * max_abs_x(spec));

  int half = std::max({8, n_max / 6 + 3,
                       static_cast<int>(std::ceil(
                           4.0 * (n_max + 1) / opts.order))});
  detail::StieltjesResult prev =
      detail::stieltjes_pass(spec, L, half, opts.order, n_max);
  for (int it = 0; it < opts.max_refinements; ++it) {
    const int half2 = half * 2;
    detail::StieltjesResult next =
        detail::stieltjes_pass(spec, L, half2, opts.order, n_max);
    double worst = 0.0;
    for (int k = 1; k <= n_max; ++k)
      worst = std::max(worst,
                       rel_diff(prev.beta[static_cast<std::size_t>(k)],
                                next.beta[static_cast<std::size_t>(k)]));
    if (worst <= opts.stability_tol) {
      RecurrenceTable t;
      t.spec = spec;
      t.n_max = n_max;
      t.p0 = next.p0;
      t.alpha.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
      t.beta = std::move(next.beta);
      t.disc = {L, half2, opts.order, next.nodes};
      return t;
    }
    prev = std::move(next);
    half = half2;
  }
  // Locate the first coefficient that refused to settle, for the error text.
  int bad_k = 1;
  {
    detail::StieltjesResult next =
        detail::stieltjes_pass(spec, L, half * 2, opts.order, n_max);
    for (int k = 1; k <= n_max; ++k)
      if (rel_diff(prev.beta[static_cast<std::size_t>(k)],
                   next.beta[static_cast<std::size_t>(k)]) >
          opts.stability_tol) {
        bad_k = k;
        break;
      }
  }
  throw DiscretizationError(
      "build_recurrence: coefficients not refinement-stable, first unstable "
      "k = " + std::to_string(bad_k));
}

// The exact rule the table was built with (deterministic reconstruction).
inline QuadratureRule make_table_rule(const RecurrenceTable& t) {
  return symmetric_panels(t.disc.L, t.disc.half_panels, t.disc.order);
}

// A deliberately different rule (offset panel count and order, slightly wider
// domain) for independent orthonormality verification.
inline QuadratureRule make_verification_rule(const RecurrenceTable& t) {
  const double L = std::min(t.disc.L * 1.02, 0.995 * max_abs_x(t.spec));
  return symmetric_panels(L, t.disc.half_panels + 7, t.disc.order + 5);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Raw values p_0(x) .. p_{m-1}(x). Overflow-guarded: far outside [-L, L] the
// raw polynomials exceed double range even though p_k * w does not; use the
// weighted variant there.
inline std::vector<double> eval_polys(const RecurrenceTable& t, double x,
                                      int m) {
  if (m < 1 || m > t.n_max + 1)
    throw DegreeError("eval_polys: m out of table range");
  std::vector<double> p(static_cast<std::size_t>(m));
  p[0] = t.p0;
  if (m == 1) return p;
  p[1] = x * t.p0 / t.beta[1];
  for (int k = 1; k + 1 < m; ++k) {
    p[static_cast<std::size_t>(k + 1)] =
        (x * p[static_cast<std::size_t>(k)] -
         t.beta[static_cast<std::size_t>(k)] *
             p[static_cast<std::size_t>(k - 1)]) /
        t.beta[static_cast<std::size_t>(k + 1)];
    if (std::abs(p[static_cast<std::size_t>(k + 1)]) > 1e290)
      throw OverflowError("eval_polys: raw value overflow at x = " +
                          format_double(x));
  }
  return p;
}

// Weighted values r_k(x) = p_k(x) w(x), same recurrence, never overflows.
inline std::vector<double> eval_polys_weighted(const RecurrenceTable& t,
                                               double x, int m) {
  if (m < 1 || m > t.n_max + 1)
    throw DegreeError("eval_polys_weighted: m out of table range");
  std::vector<double> r(static_cast<std::size_t>(m));
  r[0] = t.p0 * weight_w(t.spec, x);
  if (m == 1) return r;
  r[1] = x * r[0] / t.beta[1];
  for (int k = 1; k + 1 < m; ++k)
    r[static_cast<std::size_t>(k + 1)] =
        (x * r[static_cast<std::size_t>(k)] -
         t.beta[static_cast<std::size_t>(k)] *
             r[static_cast<std::size_t>(k - 1)]) /
        t.beta[static_cast<std::size_t>(k + 1)];
  return r;
}

// sum_k c_k p_k(x) (raw).
inline double eval_series(const RecurrenceTable& t,
                          const std::vector<double>& c, double x) {
  const auto p = eval_polys(t, x, static_cast<int>(c.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * p[k];
  return acc;
}

// sum_k c_k p_k(x) * w(x), evaluated entirely in weighted form.
inline double eval_series_weighted(const RecurrenceTable& t,
                                   const std::vector<double>& c, double x) {
  const auto r = eval_polys_weighted(t, x, static_cast<int>(c.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * r[k];
  return acc;
}

// (d/dx)[sum_k c_k p_k](x) * w(x), via the derivative of the weighted
// recurrence: with r_k = p_k w,
//   r_k + x r'_k = b_{k+1} r'_{k+1} + b_k r'_{k-1},  r'_0 = -Q'(x) r_0,
// and p'_k w = r'_k + Q'(x) r_k.
inline double eval_series_deriv_weighted(const RecurrenceTable& t,
                                         const std::vector<double>& c,
                                         double x) {
  const int m = static_cast<int>(c.size());
  if (m < 1 || m > t.n_max + 1)
    throw DegreeError("eval_series_deriv_weighted: degree out of range");
  const double qp = eval_Q(t.spec, x).Qp;
  std::vector<double> r(static_cast<std::size_t>(m)),
      rp(static_cast<std::size_t>(m));
  r[0] = t.p0 * weight_w(t.spec, x);
  rp[0] = -qp * r[0];
  if (m > 1) {
    r[1] = x * r[0] / t.beta[1];
    rp[1] = (r[0] + x * rp[0]) / t.beta[1];
    for (int k = 1; k + 1 < m; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      r[kk + 1] = (x * r[kk] - t.beta[kk] * r[kk - 1]) / t.beta[kk + 1];
      rp[kk + 1] =
          (r[kk] + x * rp[kk] - t.beta[kk] * rp[kk - 1]) / t.beta[kk + 1];
    }
  }
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    acc += c[kk] * (rp[kk] + qp * r[kk]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

// Reproducing kernel K_m(x, t) = sum_{k<m} p_k(x) p_k(t). Computed in sum
// form; away from the diagonal the Christoffel-Darboux quotient form is
// evaluated as an internal cross-check (tolerance scaled by the positive-term
// mass, which is the meaningful yardstick near kernel zeros).
inline double cd_kernel(const RecurrenceTable& t, int m, double x, double tt) {
  if (m < 1 || m > t.n_max) throw DegreeError("cd_kernel: m out of range");
  const auto px = eval_polys(t, x, m + 1);
  const auto pt = eval_polys(t, tt, m + 1);
  double sum = 0.0, scale = 0.0;
  for (int k = 0; k < m; ++k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    sum += px[kk] * pt[kk];
    scale += std::abs(px[kk] * pt[kk]);
  }
  const double sep = std::abs(x - tt);
  if (sep > 1e-6 * (1.0 + std::max(std::abs(x), std::abs(tt)))) {
    const std::size_t mm = static_cast<std::size_t>(m);
    const double cd =
        t.beta[mm] * (px[mm] * pt[mm - 1] - pt[mm] * px[mm - 1]) / (x - tt);
    if (std::abs(sum - cd) > 1e-8 * (scale + std::abs(cd)))
      throw NumericError("cd_kernel: sum and quotient forms disagree at x = " +
                         format_double(x) + ", t = " + format_double(tt));
  }
  return sum;
}

// Christoffel function 1 / K_m(x, x) (raw).
inline double christoffel(const RecurrenceTable& t, int m, double x) {
  if (m < 1 || m > t.n_max + 1) throw DegreeError("christoffel: m out of range");
  const auto p = eval_polys(t, x, m);
  double acc = 0.0;
  for (double v : p) acc += v * v;
  return 1.0 / acc;
}

// w^2(x) K_m(x, x) = sum_{k<m} r_k(x)^2, the weighted kernel diagonal.
inline double kernel_diag_weighted(const RecurrenceTable& t, int m, double x) {
  if (m < 1 || m > t.n_max + 1)
    throw DegreeError("kernel_diag_weighted: m out of range");
  const auto r = eval_polys_weighted(t, x, m);
  double acc = 0.0;
  for (double v : r) acc += v * v;
  return acc;
}

// max_{j,k < m} |<p_j, p_k> - delta_jk| under the given rule. The Gram matrix
// is accumulated from weighted values, so far-field nodes are harmless.
inline double orthonormality_residual(const RecurrenceTable& t,
                                      const QuadratureRule& rule, int m) {
  if (m < 1 || m > t.n_max + 1)
    throw DegreeError("orthonormality_residual: m out of range");
  const std::size_t mm = static_cast<std::size_t>(m);
  std::vector<double> gram(mm * mm, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto r = eval_polys_weighted(t, rule.x[i], m);
    for (std::size_t j = 0; j < mm; ++j) {
      const double wj = rule.w[i] * r[j];
      for (std::size_t k = j; k < mm; ++k) gram[j * mm + k] += wj * r[k];
    }
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < mm; ++j)
    for (std::size_t k = j; k < mm; ++k) {
      const double target = (j == k) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram[j * mm + k] - target));
    }
  return worst;
}

}  // namespace vpx
