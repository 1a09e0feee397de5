#pragma once

// Shared test utilities: Richardson-extrapolated finite differences (the
// independent oracle for every closed-form derivative in the library) and a
// closed-form MRS oracle for pure power weights.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

// Central difference with one Richardson step: O(h^4) truncation.
inline double fd1(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

inline double fd2(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double hh) {
    return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

// Closed-form MRS number for Q(x) = |x|^alpha / scale:
//   a_n = [ n * scale * sqrt(pi) * Gamma(alpha/2) / (2 Gamma((alpha+1)/2)) ]^(1/alpha)
inline double mrs_closed_form(double alpha, double scale, double n) {
  const double num = n * scale * std::sqrt(M_PI) *
                     std::exp(std::lgamma(alpha / 2.0) -
                              std::lgamma((alpha + 1.0) / 2.0));
  return std::pow(num / 2.0, 1.0 / alpha);
}

inline std::vector<double> random_coeffs(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> c(count);
  for (auto& v : c) v = dist(rng);
  return c;
}

}  // namespace testutil
