#pragma once

// Shared error types and small numeric/string utilities used across the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace vpx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure mode the library can diagnose gets its own
// type so callers can distinguish "bad input" from "numerics gave up".
// ---------------------------------------------------------------------------

struct VpxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested outside a function's mathematical domain (e.g. T at 0).
struct DomainError : VpxError { using VpxError::VpxError; };
// An intermediate quantity left the representable range of double.
struct OverflowError : VpxError { using VpxError::VpxError; };
// Root bracketing failed (target not enclosable within the representable range).
struct NoBracketError : VpxError { using VpxError::VpxError; };
// An iteration failed to reach its tolerance within its step cap.
struct ConvergenceError : VpxError { using VpxError::VpxError; };
// Discretized measure too coarse/degenerate for the requested degree.
struct DiscretizationError : VpxError { using VpxError::VpxError; };
// Degree/index out of the range a table supports.
struct DegreeError : VpxError { using VpxError::VpxError; };
// Quadrature refinement failed its stability contract.
struct QuadratureError : VpxError { using VpxError::VpxError; };
// Norm evaluation detected a growing tail (object not in the space).
struct UnboundedError : VpxError { using VpxError::VpxError; };
// Internal cross-check between two independent computations disagreed.
struct NumericError : VpxError { using VpxError::VpxError; };
// Coefficient tail too short / not yet decayed for the requested accuracy.
struct TailError : VpxError { using VpxError::VpxError; };
// Malformed configuration / spec input.
struct ConfigError : VpxError { using VpxError::VpxError; };

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

inline double sqr(double x) { return x * x; }

// Least-squares slope of log(y) against log(n). Pairs with a nonpositive
// coordinate are skipped; fewer than two usable pairs yields slope 0.
inline double loglog_slope(const std::vector<double>& ns,
                           const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < ns.size() && i < ys.size(); ++i) {
    if (!(ns[i] > 0.0) || !(ys[i] > 0.0)) continue;
    const double lx = std::log(ns[i]), ly = std::log(ys[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (m * sxy - sx * sy) / denom;
}

// Index where the "top half" of a sweep starts (slopes are judged there,
// where asymptotic behaviour has set in).
inline std::size_t top_half_start(std::size_t len) { return len / 2; }

inline double loglog_slope_top_half(const std::vector<double>& ns,
                                    const std::vector<double>& ys) {
  const std::size_t s = top_half_start(std::min(ns.size(), ys.size()));
  std::vector<double> n2(ns.begin() + static_cast<std::ptrdiff_t>(s), ns.end());
  std::vector<double> y2(ys.begin() + static_cast<std::ptrdiff_t>(s), ys.end());
  return loglog_slope(n2, y2);
}

// FNV-1a 64-bit digest; used to fingerprint configurations in reports.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

// Shortest round-trippable decimal form of a double (deterministic output files).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Chunked parallel loop. Work items must be independent; the body receives the
// item index. Falls back to a serial loop on single-core hosts or tiny counts.
// ---------------------------------------------------------------------------
template <class Body>
void parallel_for(std::size_t count, const Body& body,
                  unsigned max_threads = 0) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (max_threads != 0) hw = std::min(hw, max_threads);
  if (hw <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const unsigned nt = static_cast<unsigned>(
      std::min<std::size_t>(hw, count));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += nt) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vpx
