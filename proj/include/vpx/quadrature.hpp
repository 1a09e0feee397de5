#pragma once

// Gauss quadrature building blocks: Gauss-Legendre nodes/weights on [-1,1]
// (computed by Newton iteration on the Legendre recurrence and cached),
// composite panel rules over arbitrary breakpoint lists, and Gauss-Chebyshev
// (first kind) rules whose weight absorbs the (1-x^2)^{-1/2} singularity.

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "vpx/common.hpp"

namespace vpx {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int m) {
  QuadratureRule r;
  r.x.resize(static_cast<std::size_t>(m));
  r.w.resize(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Standard asymptotic initial guess for the i-th root of P_m.
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      // p0 = P_m(z); derivative from the standard identity.
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[static_cast<std::size_t>(i)] = -z;
    r.x[static_cast<std::size_t>(m - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[static_cast<std::size_t>(i)] = wi;
    r.w[static_cast<std::size_t>(m - 1 - i)] = wi;
  }
  if (m % 2 == 1) r.x[static_cast<std::size_t>(m / 2)] = 0.0;
  return r;
}

}  // namespace detail

// Cached Gauss-Legendre rule on [-1, 1]. Thread-safe; references stay valid.
inline const QuadratureRule& gauss_legendre(int order) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, detail::compute_gauss_legendre(order)).first;
  return it->second;
}

// Composite rule: GL(order) mapped onto each [b_i, b_{i+1}] panel.
inline QuadratureRule composite_gauss(const std::vector<double>& breaks,
                                      int order) {
  if (breaks.size() < 2) throw ConfigError("composite_gauss: need >= 2 breakpoints");
  const QuadratureRule& base = gauss_legendre(order);
  QuadratureRule r;
  r.x.reserve((breaks.size() - 1) * base.size());
  r.w.reserve((breaks.size() - 1) * base.size());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) throw ConfigError("composite_gauss: breakpoints must ascend");
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (std::size_t i = 0; i < base.size(); ++i) {
      r.x.push_back(mid + hl * base.x[i]);
      r.w.push_back(hl * base.w[i]);
    }
  }
  return r;
}

// Equal-width panels over [-L, L], mirrored about 0 so the node set is exactly
// symmetric (panel edges at 0 and +-L always included).
inline QuadratureRule symmetric_panels(double L, int half_panels, int order) {
  if (!(L > 0.0)) throw ConfigError("symmetric_panels: L must be positive");
  if (half_panels < 1) throw ConfigError("symmetric_panels: need >= 1 panel");
  std::vector<double> pos(static_cast<std::size_t>(half_panels) + 1);
  for (int i = 0; i <= half_panels; ++i)
    pos[static_cast<std::size_t>(i)] = L * static_cast<double>(i) / half_panels;
  QuadratureRule right = composite_gauss(pos, order);
  QuadratureRule r;
  const std::size_t m = right.size();
  r.x.resize(2 * m);
  r.w.resize(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    // Mirror with identical weights: exact +- symmetry of the node set.
    r.x[m - 1 - i] = -right.x[i];
    r.w[m - 1 - i] = right.w[i];
    r.x[m + i] = right.x[i];
    r.w[m + i] = right.w[i];
  }
  return r;
}

// Gauss-Chebyshev (first kind) on (-1, 1): sum_i (pi/count) f(x_i) integrates
// f(x) (1-x^2)^{-1/2} dx exactly for polynomial f up to degree 2*count - 1.
inline QuadratureRule gauss_chebyshev(int count) {
  if (count < 1) throw ConfigError("gauss_chebyshev: count must be >= 1");
  QuadratureRule r;
  r.x.resize(static_cast<std::size_t>(count));
  r.w.assign(static_cast<std::size_t>(count), M_PI / count);
  for (int i = 0; i < count; ++i)
    r.x[static_cast<std::size_t>(i)] =
        std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * count));
  return r;
}

template <class F>
double integrate(const QuadratureRule& rule, const F& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.w[i] * f(rule.x[i]);
  return acc;
}

}  // namespace vpx
