#pragma once

// Experiment harness: wires weights, recurrence tables, VP means, and norms
// into gated empirical sweeps, and writes deterministic CSV/JSON reports.
//
// Everything here is driven by a RunConfig. Each experiment produces one
// ExperimentReport: per-cell records (one CSV row each) plus one or more
// gated series whose fitted log-log slope over the top half of the n-range
// must stay below the configured threshold. A slope near zero means the
// measured constant has stopped growing, which is the empirical statement
// of boundedness at desk scale.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vpx/common.hpp"
#include "vpx/io.hpp"
#include "vpx/mrs.hpp"
#include "vpx/norms.hpp"
#include "vpx/operators.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/presets.hpp"
#include "vpx/targets.hpp"
#include "vpx/weights.hpp"

namespace vpx {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct Thresholds {
  double slope = 0.05;        // max log2-log2 slope of a gated series
  double error_floor = 1e-10; // below this, errors are at the measurement
                              // floor and switch to the residual evaluator
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "vp_uniform_bound", "vp_growth",   "vp_convergence", "favard",
      "bernstein",        "kernel_diag", "vp_bound_edge"};
  return ids;
}

struct RunConfig {
  std::vector<WeightSpec> specs;
  std::vector<int> n_lebesgue = {2, 4, 8, 16, 32};
  std::vector<int> n_kernel = {2, 4, 8, 16, 32, 64};
  std::vector<int> n_approx = {4, 8, 16, 32, 64};
  std::vector<double> p_ratio = {1.0, 2.0};    // finite-p ratio sweeps
  std::vector<double> p_approx = {2.0, kInf};  // error / derivative sweeps
  int degree_floor = 0;       // optional lower bound on the table degree
  int bernstein_polys = 20;   // random polynomials per (n, p) cell
  std::uint64_t seed = 20240817ull;
  Thresholds thresholds;
  std::vector<std::string> experiments = experiment_ids();
  bool emit_plots_data = false;

  // Largest polynomial degree any experiment touches. Expansion length for
  // the error sweeps is 4x the largest approximation index so that reference
  // tails satisfy their accuracy precondition.
  int table_degree() const {
    int deg = 8;
    for (int n : n_lebesgue) deg = std::max(deg, 2 * n);
    for (int n : n_kernel) deg = std::max(deg, n);
    for (int n : n_approx) deg = std::max(deg, 4 * n);
    return std::max(deg, degree_floor);
  }

  int coeff_K() const {
    int k = 0;
    for (int n : n_approx) k = std::max(k, 4 * n);
    for (int n : n_lebesgue) k = std::max(k, 2 * n);
    return std::max(k, 8);
  }

  void validate() const {
    if (specs.empty()) throw ConfigError("run config: no weight specs");
    if (n_lebesgue.empty() || n_kernel.empty() || n_approx.empty())
      throw ConfigError("run config: empty n list");
    for (const auto& lst : {n_lebesgue, n_kernel, n_approx})
      for (int n : lst)
        if (n < 1) throw ConfigError("run config: n entries must be >= 1");
    if (p_ratio.empty() || p_approx.empty())
      throw ConfigError("run config: empty p list");
    for (double p : p_ratio)
      if (!(p >= 1.0) || p == kInf)
        throw ConfigError("run config: p_ratio entries must be finite, >= 1");
    for (double p : p_approx)
      if (!(p >= 1.0)) throw ConfigError("run config: p entries must be >= 1");
    if (bernstein_polys < 1)
      throw ConfigError("run config: bernstein_polys must be >= 1");
    const auto& known = experiment_ids();
    if (experiments.empty())
      throw ConfigError("run config: empty experiment list");
    for (const auto& id : experiments)
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw ConfigError("run config: unknown experiment '" + id + "'");
  }
};

inline RunConfig default_run_config() {
  RunConfig cfg;
  cfg.specs = {preset("freud-hermite"), preset("erdos-1")};
  return cfg;
}

namespace detail {

inline json p_list_to_json(const std::vector<double>& ps) {
  json a = json::array();
  for (double p : ps) {
    if (p == kInf)
      a.push_back("inf");
    else
      a.push_back(p);
  }
  return a;
}

inline std::vector<double> p_list_from_json(const json& a,
                                            const std::string& what) {
  std::vector<double> out;
  for (const auto& v : a) {
    if (v.is_string()) {
      if (v.get<std::string>() != "inf")
        throw ConfigError(what + ": bad p entry '" + v.get<std::string>() +
                          "'");
      out.push_back(kInf);
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ConfigError(what + ": p entries must be numbers or \"inf\"");
    }
  }
  return out;
}

}  // namespace detail

inline json run_config_to_json(const RunConfig& cfg) {
  json j;
  json specs = json::array();
  for (const auto& s : cfg.specs) specs.push_back(weight_spec_to_json(s));
  j["presets"] = specs;
  j["n_lebesgue"] = cfg.n_lebesgue;
  j["n_kernel"] = cfg.n_kernel;
  j["n_approx"] = cfg.n_approx;
  j["p_ratio"] = detail::p_list_to_json(cfg.p_ratio);
  j["p_approx"] = detail::p_list_to_json(cfg.p_approx);
  j["degree_floor"] = cfg.degree_floor;
  j["bernstein_polys"] = cfg.bernstein_polys;
  j["seed"] = cfg.seed;
  j["thresholds"] = {{"slope", cfg.thresholds.slope},
                     {"error_floor", cfg.thresholds.error_floor}};
  j["experiments"] = cfg.experiments;
  j["emit_plots_data"] = cfg.emit_plots_data;
  return j;
}

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg = default_run_config();
  if (j.contains("presets")) {
    cfg.specs.clear();
    for (const auto& e : j.at("presets")) {
      if (e.is_string())
        cfg.specs.push_back(preset(e.get<std::string>()));
      else
        cfg.specs.push_back(weight_spec_from_json(e));
    }
  }
  if (j.contains("n_lebesgue"))
    cfg.n_lebesgue = j.at("n_lebesgue").get<std::vector<int>>();
  if (j.contains("n_kernel"))
    cfg.n_kernel = j.at("n_kernel").get<std::vector<int>>();
  if (j.contains("n_approx"))
    cfg.n_approx = j.at("n_approx").get<std::vector<int>>();
  if (j.contains("p_ratio"))
    cfg.p_ratio = detail::p_list_from_json(j.at("p_ratio"), "p_ratio");
  if (j.contains("p_approx"))
    cfg.p_approx = detail::p_list_from_json(j.at("p_approx"), "p_approx");
  if (j.contains("degree_floor"))
    cfg.degree_floor = j.at("degree_floor").get<int>();
  if (j.contains("bernstein_polys"))
    cfg.bernstein_polys = j.at("bernstein_polys").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    if (t.contains("slope"))
      cfg.thresholds.slope = t.at("slope").get<double>();
    if (t.contains("error_floor"))
      cfg.thresholds.error_floor = t.at("error_floor").get<double>();
  }
  if (j.contains("experiments"))
    cfg.experiments = j.at("experiments").get<std::vector<std::string>>();
  if (j.contains("emit_plots_data"))
    cfg.emit_plots_data = j.at("emit_plots_data").get<bool>();
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Records and reports
// ---------------------------------------------------------------------------

struct CellRecord {
  std::string experiment;
  std::string series;
  double n = 0.0;
  double p = 0.0;
  std::string target;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// One gated (or recorded-only) value series C(n). kind selects the gate:
//   "slope"        — fitted log2 C vs log2 n slope over the top half <= threshold
//   "slope-pooled" — slope fit pooled over per-draw cells (set by the
//                    experiment); the value vector still reports the per-n max
//   "decrease"     — C(n) strictly decreasing over the whole list
//   "none"         — recorded for the report, never gated
struct SeriesGate {
  std::string key;
  std::string kind = "slope";
  std::vector<double> n;
  std::vector<double> value;
  double slope = 0.0;
  bool gated = true;
  bool pass = true;
};

struct ExperimentReport {
  std::string id;
  bool pass = true;
  double c_emp = 0.0;
  double threshold = 0.0;
  std::vector<SeriesGate> series;
  std::vector<CellRecord> cells;
  std::vector<std::string> notes;
  double runtime_s = 0.0;
};

// Least-squares slope of log2(value) against log2(n) over the top half of
// the points (midpoint included). Fewer than two usable points fits nothing
// and reports zero; callers note that case separately.
inline double fitted_log_slope(const std::vector<double>& ns,
                               const std::vector<double>& vals) {
  const std::size_t m = ns.size();
  if (m < 2) return 0.0;
  const std::size_t start = m / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = start; i < m; ++i) {
    if (!(vals[i] > 0.0) || !(ns[i] > 0.0)) continue;
    const double x = std::log2(ns[i]);
    const double y = std::log2(vals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double den = cnt * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return 0.0;
  return (cnt * sxy - sx * sy) / den;
}

namespace detail {

// Least-squares slope of log2(value) against log2(n) over every given point
// (callers pre-select the window; repeated n values are expected).
inline double log_slope_all(const std::vector<double>& ns,
                            const std::vector<double>& vals) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(vals[i] > 0.0) || !(ns[i] > 0.0)) continue;
    const double x = std::log2(ns[i]);
    const double y = std::log2(vals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double den = cnt * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return 0.0;
  return (cnt * sxy - sx * sy) / den;
}

inline void finish_series(SeriesGate& s, double threshold) {
  if (s.kind == "slope") {
    s.slope = fitted_log_slope(s.n, s.value);
    if (s.gated) s.pass = (s.slope <= threshold);
  } else if (s.kind == "slope-pooled") {
    // s.slope was fit by the experiment from pooled per-draw cells; the
    // value vector only carries the per-n max for the report.
    if (s.gated) s.pass = (s.slope <= threshold);
  } else if (s.kind == "decrease") {
    s.slope = fitted_log_slope(s.n, s.value);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < s.value.size(); ++i)
      ok = ok && (s.value[i + 1] < s.value[i]);
    if (s.gated) s.pass = ok && s.value.size() >= 2;
  } else {
    s.slope = fitted_log_slope(s.n, s.value);
    s.gated = false;
    s.pass = true;
  }
}

inline void finish_report(ExperimentReport& r) {
  for (auto& s : r.series) {
    finish_series(s, r.threshold);
    if (s.gated && !s.pass) r.pass = false;
    if ((s.kind == "slope" || s.kind == "slope-pooled") && s.gated)
      for (double v : s.value) r.c_emp = std::max(r.c_emp, v);
  }
}

inline std::string p_label(double p) {
  return (p == kInf) ? "inf" : format_double(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-preset context: tables, caches, and norm plumbing
// ---------------------------------------------------------------------------

struct PresetContext {
  WeightSpec spec;
  std::string label;
  MrsTable mrs;
  RecurrenceTable table;
  QuadratureRule proj_rule;  // build-quality rule for derivative projections
  int coeff_K = 0;           // shared expansion length for fixed targets
  std::map<std::string, ExpansionCoeffs> coeff_cache;
  std::map<std::string, double> norm_cache;
};

inline std::string preset_label(const WeightSpec& s) {
  std::string base = s.name.empty()
                         ? family_name(s.family) + "-a" + format_double(s.alpha)
                         : s.name;
  for (char& c : base)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      c = '-';
  return base;
}

inline PresetContext make_context(const WeightSpec& spec,
                                  const RunConfig& cfg) {
  PresetContext ctx{spec,
                    preset_label(spec),
                    MrsTable(spec),
                    RecurrenceTable{},
                    QuadratureRule{},
                    0,
                    {},
                    {}};
  // Every a_m any experiment touches is ensured up front: each n plus its
  // doubles (windows, truncation radii) and quadruples (edge profile at 2n).
  std::vector<double> prep;
  auto add = [&prep](int n) {
    prep.push_back(n);
    prep.push_back(2.0 * n);
    prep.push_back(4.0 * n);
  };
  for (int n : cfg.n_lebesgue) add(n);
  for (int n : cfg.n_kernel) add(n);
  for (int n : cfg.n_approx) add(n);
  const int deg = cfg.table_degree();
  const int K = cfg.coeff_K();
  prep.push_back(K);
  prep.push_back(2.0 * K);
  prep.push_back(K / 2.0);
  prep.push_back(deg);
  ctx.mrs.prepare(prep, /*with_doubles=*/true);
  ctx.table = build_recurrence(spec, ctx.mrs, deg);
  ctx.proj_rule = make_table_rule(ctx.table);
  ctx.coeff_K = K;
  return ctx;
}

// Expansion coefficients for a target. Fixed targets are computed once at
// the shared length and cached under their name; per-n targets (bumps pinned
// to a_n) are computed fresh at the requested length.
inline const ExpansionCoeffs& shared_coeffs(PresetContext& ctx,
                                            const TargetFunction& t) {
  auto it = ctx.coeff_cache.find(t.name);
  if (it != ctx.coeff_cache.end()) return it->second;
  FourierOptions opt;
  opt.breakpoints = t.kinks(1.5 * ctx.mrs.ensure(2.0 * ctx.coeff_K));
  ExpansionCoeffs c =
      fourier_coeffs(ctx.table, ctx.mrs, t.f, ctx.coeff_K, opt);
  return ctx.coeff_cache.emplace(t.name, std::move(c)).first->second;
}

inline ExpansionCoeffs coeffs_at(PresetContext& ctx, const TargetFunction& t,
                                 int K) {
  FourierOptions opt;
  opt.breakpoints = t.kinks(1.5 * ctx.mrs.ensure(2.0 * K));
  return fourier_coeffs(ctx.table, ctx.mrs, t.f, K, opt);
}

inline NormRequest make_req(double p, double t_exp, bool includes_w,
                            double n_ctx, std::vector<double> breaks = {}) {
  NormRequest r;
  r.p = p;
  r.t_exponent = t_exp;
  r.g_includes_w = includes_w;
  r.n_ctx = n_ctx;
  r.breakpoints = std::move(breaks);
  return r;
}

// || f w T^q ||_p for a raw target, cached per (target, p, q). The value does
// not depend on the degree context (the certified tail blocks pick up any
// mass past the body domain), so one entry serves every n. Targets whose
// definition varies with n must pass a disambiguating cache_tag.
inline double target_norm(PresetContext& ctx, const TargetFunction& t,
                          double p, double t_exp, double n_ctx,
                          const std::string& cache_tag = "") {
  const std::string key = t.name + cache_tag + "|p=" + detail::p_label(p) +
                          "|q=" + format_double(t_exp);
  auto it = ctx.norm_cache.find(key);
  if (it != ctx.norm_cache.end()) return it->second;
  const double L_est = 1.5 * ctx.mrs.ensure(2.0 * n_ctx);
  const NormResult r = weighted_norm(
      ctx.spec, ctx.mrs, t.f,
      make_req(p, t_exp, /*includes_w=*/false, n_ctx, t.kinks(L_est)));
  ctx.norm_cache.emplace(key, r.value);
  return r.value;
}

// || (sum_k c_k p_k) w T^q ||_p for a coefficient vector.
inline double series_norm(PresetContext& ctx, const std::vector<double>& c,
                          double p, double t_exp, double n_ctx) {
  auto g = [&ctx, &c](double x) {
    return eval_series_weighted(ctx.table, c, x);
  };
  return weighted_norm(ctx.spec, ctx.mrs, g,
                       make_req(p, t_exp, /*includes_w=*/true, n_ctx))
      .value;
}

// ---------------------------------------------------------------------------
// Damped approximation error || (f - v_n f) w T^{-1/4} ||_p
//
// Above the measurement floor the error is integrated directly. At the floor
// the direct integrand is dominated by quadrature noise, so the evaluator
// switches to the residual series e_k = c_k (1 - tau_k), which represents
// f - v_n(f) exactly up to the shared truncation: at p = 2 on constant-T
// weights that is a closed form, otherwise a quadrature of the residual; at
// p = infinity a Cauchy-Schwarz envelope ||e||_2 sup_x sqrt(sum r_k^2 /
// sqrt(T)) gives a certified upper bound that still decreases strictly in n.
// ---------------------------------------------------------------------------

struct ErrorCell {
  double value = 0.0;
  bool at_floor = false;
};

namespace detail {

inline std::vector<double> residual_coeffs(const ExpansionCoeffs& coeffs,
                                           int n) {
  std::vector<double> e(coeffs.c.begin(), coeffs.c.end());
  const auto tau = vp_taper(n);
  for (int k = 0; k < 2 * n && k < coeffs.K; ++k)
    e[static_cast<std::size_t>(k)] *= 1.0 - tau[static_cast<std::size_t>(k)];
  return e;
}

inline double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// E_{2,n} with the mass beyond the K-term window restored by a dyadic
// extrapolation: block sums S_j over [K/2^{j+1}, K/2^j) estimate the decay
// ratio, and a geometric continuation supplies sum_{k >= K} c_k^2. Entire
// targets have S_0 at roundoff (no correction); algebraic tails otherwise
// lose ~(4n/K)^{s-1} of their mass exactly where n approaches K/4, which
// biases error/E ratios upward at the top of the sweep. Blocks that do not
// decay (coefficient noise floor) are left uncorrected.
inline double completed_E2(const ExpansionCoeffs& coeffs, int n) {
  const ApproxError base = best_approx_error2(coeffs, n);
  const int K = coeffs.K;
  double s0 = 0.0, s1 = 0.0;
  for (int k = K / 2; k < K; ++k)
    s0 += sqr(coeffs.c[static_cast<std::size_t>(k)]);
  for (int k = K / 4; k < K / 2; ++k)
    s1 += sqr(coeffs.c[static_cast<std::size_t>(k)]);
  double extra = 0.0;
  if (s0 > 0.0 && s1 > s0) {
    const double rho = s0 / s1;
    if (rho < 0.9) extra = s0 * rho / (1.0 - rho);
  }
  return std::sqrt(sqr(base.value) + extra);
}

// || sqrt(sum_{k<K} r_k^2) T^{-1/4} ||_p: the envelope factor of the
// Cauchy-Schwarz residual bound. The integrand is O(sqrt(K/a_K)) and smooth,
// so this stays quadrature-stable even though the residuals it will be
// multiplied with are at roundoff scale. Cached per (preset, p).
inline double residual_envelope(PresetContext& ctx, double p) {
  const std::string key = "__residual_envelope:p=" + p_label(p);
  auto it = ctx.norm_cache.find(key);
  if (it != ctx.norm_cache.end()) return it->second;
  auto g = [&ctx](double x) {
    return std::sqrt(
        std::max(0.0, kernel_diag_weighted(ctx.table, ctx.coeff_K, x)));
  };
  const NormResult r =
      weighted_norm(ctx.spec, ctx.mrs, g,
                    make_req(p, -0.25, /*includes_w=*/true,
                             std::max(1.0, ctx.coeff_K / 2.0)));
  ctx.norm_cache.emplace(key, r.value);
  return r.value;
}

}  // namespace detail

inline ErrorCell damped_vp_error(PresetContext& ctx, const TargetFunction& t,
                                 const ExpansionCoeffs& coeffs, int n,
                                 double p, double floor) {
  // Certified bound on the residual series first. At p = 2 it is
  // T(0+)^{-1/4} ||e||_2: exact by Parseval when T is constant, an upper
  // bound otherwise (T increases from its origin limit). Elsewhere the
  // Cauchy-Schwarz envelope |sum e_k r_k| <= ||e||_2 sqrt(sum r_k^2) gives
  // ||e||_2 times a cached norm. When the bound already sits at the
  // measurement floor, direct quadrature would be asked to stabilize pure
  // cancellation noise, so it is skipped; the bound is reported instead and
  // still decreases strictly in n (same coefficients, smaller multipliers).
  const std::vector<double> e = detail::residual_coeffs(coeffs, n);
  const double e2 = detail::l2(e);
  const double bound =
      (p == 2.0) ? std::pow(T_limit0(ctx.spec), -0.25) * e2
                 : e2 * detail::residual_envelope(ctx, p);
  if (bound <= floor) return {bound, true};

  const VpPolynomial vp = vp_mean(coeffs, n);
  auto g = [&ctx, &t, &vp](double x) {
    const double w = weight_w(ctx.spec, x);
    const double fw = (w == 0.0) ? 0.0 : t.f(x) * w;
    return fw - vp_eval_weighted(ctx.table, vp, x);
  };
  const double L_est = 1.5 * ctx.mrs.ensure(2.0 * n);
  const NormResult direct = weighted_norm(
      ctx.spec, ctx.mrs, g,
      make_req(p, -0.25, /*includes_w=*/true, n, t.kinks(L_est)));
  if (direct.value > floor) return {direct.value, false};
  return {bound, true};
}

// ---------------------------------------------------------------------------
// Deterministic polynomial draws (coefficients in the orthonormal basis)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> random_poly_coeffs(std::mt19937_64& rng, int n) {
  std::vector<double> q(static_cast<std::size_t>(n) + 1);
  for (auto& v : q) {
    // top 53 bits -> [0,1); affine to [-1,1). Stable across platforms.
    const double u =
        static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    v = 2.0 * u - 1.0;
  }
  return q;
}

inline std::mt19937_64 cell_rng(const RunConfig& cfg, const PresetContext& ctx,
                                const std::string& experiment, int n) {
  const std::uint64_t mix = cfg.seed ^ fnv1a64(ctx.label) ^
                            fnv1a64(experiment) ^
                            (static_cast<std::uint64_t>(n) *
                             0x9e3779b97f4a7c15ull);
  return std::mt19937_64(mix);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Uniform boundedness of the VP map: exact sup-operator norms at p = infinity
// (damped-output and weighted-input functionals) and dictionary max-ratios at
// finite p for both inequality forms.
inline ExperimentReport exp_uniform_bound(PresetContext& ctx,
                                          const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "vp_uniform_bound";
  rep.threshold = cfg.thresholds.slope;

  struct Mode {
    const char* tag;
    LebesgueWeights lw;
    double lhs_exp;  // T exponent on || v_n(f) w T^q ||_p
    double rhs_exp;  // T exponent on || f w T^q ||_p
  };
  const std::vector<Mode> modes = {
      {"damped", damped_output_mode(), -0.25, 0.0},
      {"weighted_input", weighted_input_mode(), 0.0, 0.25}};

  for (const auto& mode : modes) {
    SeriesGate s;
    s.key = std::string(mode.tag) + ":p=inf";
    for (int n : cfg.n_lebesgue) {
      const OperatorNormResult r =
          vp_operator_norm(ctx.table, ctx.mrs, n, mode.lw);
      rep.cells.push_back({rep.id, mode.tag, double(n), kInf, "operator",
                           r.value, 1.0, r.value});
      s.n.push_back(n);
      s.value.push_back(r.value);
    }
    rep.series.push_back(std::move(s));
  }

  for (const auto& mode : modes) {
    for (double p : cfg.p_ratio) {
      SeriesGate s;
      s.key = std::string(mode.tag) + ":p=" + detail::p_label(p);
      for (int n : cfg.n_lebesgue) {
        const double an = ctx.mrs.a(n);
        double worst = 0.0;
        for (const auto& t : ratio_dictionary(ctx.spec, an)) {
          const bool per_n = t.name.find('@') != std::string::npos;
          const ExpansionCoeffs local =
              per_n ? coeffs_at(ctx, t, 2 * n) : ExpansionCoeffs{};
          const ExpansionCoeffs& c = per_n ? local : shared_coeffs(ctx, t);
          const VpPolynomial vp = vp_mean(c, n);
          const double lhs = series_norm(ctx, vp.d, p, mode.lhs_exp, n);
          const double rhs =
              target_norm(ctx, t, p, mode.rhs_exp, n,
                          per_n ? ":n=" + std::to_string(n) : "");
          const double ratio = lhs / rhs;
          rep.cells.push_back(
              {rep.id, mode.tag, double(n), p, t.name, lhs, rhs, ratio});
          worst = std::max(worst, ratio);
        }
        s.n.push_back(n);
        s.value.push_back(worst);
      }
      rep.series.push_back(std::move(s));
    }
  }
  detail::finish_report(rep);
  return rep;
}

// Growth envelope without damping: plain-mode operator norms normalized by
// T(a_n)^{1/4}, dictionary ratios at finite p under the same normalization,
// and the reproduction identity on random polynomials as a recorded sanity
// row (exact Parseval ratio, not gated).
inline ExperimentReport exp_growth(PresetContext& ctx, const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "vp_growth";
  rep.threshold = cfg.thresholds.slope;

  {
    SeriesGate s;
    s.key = "plain_normalized:p=inf";
    for (int n : cfg.n_lebesgue) {
      const double scale = std::pow(eval_T(ctx.spec, ctx.mrs.a(n)), 0.25);
      const OperatorNormResult r =
          vp_operator_norm(ctx.table, ctx.mrs, n, plain_mode());
      rep.cells.push_back({rep.id, "plain", double(n), kInf, "operator",
                           r.value, scale, r.value / scale});
      s.n.push_back(n);
      s.value.push_back(r.value / scale);
    }
    rep.series.push_back(std::move(s));
  }

  for (double p : cfg.p_ratio) {
    SeriesGate s;
    s.key = "plain_normalized:p=" + detail::p_label(p);
    for (int n : cfg.n_lebesgue) {
      const double an = ctx.mrs.a(n);
      const double scale = std::pow(eval_T(ctx.spec, an), 0.25);
      double worst = 0.0;
      for (const auto& t : ratio_dictionary(ctx.spec, an)) {
        const bool per_n = t.name.find('@') != std::string::npos;
        const ExpansionCoeffs local =
            per_n ? coeffs_at(ctx, t, 2 * n) : ExpansionCoeffs{};
        const ExpansionCoeffs& c = per_n ? local : shared_coeffs(ctx, t);
        const VpPolynomial vp = vp_mean(c, n);
        const double lhs = series_norm(ctx, vp.d, p, 0.0, n);
        const double rhs =
            scale * target_norm(ctx, t, p, 0.0, n,
                                per_n ? ":n=" + std::to_string(n) : "");
        const double ratio = lhs / rhs;
        rep.cells.push_back(
            {rep.id, "plain", double(n), p, t.name, lhs, rhs, ratio});
        worst = std::max(worst, ratio);
      }
      s.n.push_back(n);
      s.value.push_back(worst);
    }
    rep.series.push_back(std::move(s));
  }

  {
    // Reproduction: v_n(P) = P for deg P <= n, pushed through the full
    // coefficient pipeline. The p = 2 norm ratio is exact by orthonormality.
    SeriesGate s;
    s.key = "reproduction:p=2";
    s.kind = "none";
    double worst_dev = 0.0;
    for (int n : cfg.n_lebesgue) {
      auto rng = detail::cell_rng(cfg, ctx, "vp_growth", n);
      const std::vector<double> q = detail::random_poly_coeffs(rng, n);
      auto f = [&ctx, &q](double x) {
        return eval_series_weighted(ctx.table, q, x);
      };
      FourierOptions opt;
      opt.f_includes_w = true;
      const ExpansionCoeffs c =
          fourier_coeffs(ctx.table, ctx.mrs, f, 2 * n, opt);
      const VpPolynomial vp = vp_mean(c, n);
      const double lhs = detail::l2(vp.d);
      const double rhs = detail::l2(q);
      rep.cells.push_back({rep.id, "reproduction", double(n), 2.0,
                           "random-poly", lhs, rhs, lhs / rhs});
      s.n.push_back(n);
      s.value.push_back(lhs / rhs);
      worst_dev = std::max(worst_dev, std::abs(lhs / rhs - 1.0));
    }
    rep.series.push_back(std::move(s));
    rep.notes.push_back("reproduction ratio max |1 - ratio| = " +
                        format_double(worst_dev));
  }
  detail::finish_report(rep);
  return rep;
}

// Damped errors against the best-approximation reference: errors must fall
// strictly in n, and the ratio error / E_{p,n} must stay flat where the
// error is above the measurement floor.
inline ExperimentReport exp_convergence(PresetContext& ctx,
                                        const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "vp_convergence";
  rep.threshold = cfg.thresholds.slope;
  const double floor = cfg.thresholds.error_floor;

  for (const auto& t : convergence_targets()) {
    const ExpansionCoeffs& c = shared_coeffs(ctx, t);
    for (double p : cfg.p_approx) {
      SeriesGate err_s, ratio_s;
      err_s.key = "error:" + t.name + ":p=" + detail::p_label(p);
      err_s.kind = "decrease";
      ratio_s.key = "ratio:" + t.name + ":p=" + detail::p_label(p);
      int floored = 0;
      for (int n : cfg.n_approx) {
        const ErrorCell e = damped_vp_error(ctx, t, c, n, p, floor);
        const double L_est = 1.5 * ctx.mrs.ensure(2.0 * n);
        // p = 2 reference: exact Parseval tail, completed past K. Other p:
        // flagged candidate-projection upper bounds, measured directly.
        ApproxError ref;
        if (p == 2.0) {
          ref = best_approx_error2(c, n);
          ref.value = detail::completed_E2(c, n);
        } else {
          ref = best_approx_error(ctx.table, ctx.mrs, c, t.f,
                                  /*f_includes_w=*/false, n, p,
                                  t.kinks(L_est));
        }
        const double ratio =
            (ref.value > 0.0) ? e.value / ref.value : kInf;
        rep.cells.push_back(
            {rep.id, "error", double(n), p, t.name, e.value, ref.value,
             ratio});
        err_s.n.push_back(n);
        err_s.value.push_back(e.value);
        if (!e.at_floor && ref.value > 0.0) {
          ratio_s.n.push_back(n);
          ratio_s.value.push_back(ratio);
        } else {
          ++floored;
        }
      }
      if (floored > 0)
        rep.notes.push_back(err_s.key + ": " + std::to_string(floored) +
                            " cell(s) at the measurement floor; excluded "
                            "from the ratio gate");
      if (ratio_s.value.size() < 2) {
        ratio_s.gated = false;
        rep.notes.push_back(ratio_s.key +
                            ": too few informative cells to fit a slope");
      }
      rep.series.push_back(std::move(err_s));
      rep.series.push_back(std::move(ratio_s));
    }
  }
  detail::finish_report(rep);
  return rep;
}

// First-order error bound on smooth targets: the damped error, scaled by
// n / a_n against || f' w ||_p, must stay flat.
inline ExperimentReport exp_favard(PresetContext& ctx, const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "favard";
  rep.threshold = cfg.thresholds.slope;
  const double floor = cfg.thresholds.error_floor;

  for (const auto& t : smooth_targets()) {
    const ExpansionCoeffs& c = shared_coeffs(ctx, t);
    TargetFunction deriv;  // wrap f' for the cached-norm helper
    deriv.name = t.name + "'";
    deriv.f = t.df;
    const double n_top =
        *std::max_element(cfg.n_approx.begin(), cfg.n_approx.end());
    for (double p : cfg.p_approx) {
      SeriesGate s;
      s.key = t.name + ":p=" + detail::p_label(p);
      int floored = 0;
      for (int n : cfg.n_approx) {
        const ErrorCell e = damped_vp_error(ctx, t, c, n, p, floor);
        const double an = ctx.mrs.a(n);
        const double fprime = target_norm(ctx, deriv, p, 0.0, n_top);
        const double rhs = an / n * fprime;
        const double ratio = e.value / rhs;
        rep.cells.push_back(
            {rep.id, "favard", double(n), p, t.name, e.value, rhs, ratio});
        if (!e.at_floor) {
          s.n.push_back(n);
          s.value.push_back(ratio);
        } else {
          ++floored;
        }
      }
      if (floored > 0)
        rep.notes.push_back(s.key + ": " + std::to_string(floored) +
                            " cell(s) at the measurement floor; excluded "
                            "from the gate");
      if (s.value.size() < 2) {
        s.gated = false;
        rep.notes.push_back(s.key +
                            ": too few informative cells to fit a slope");
      }
      rep.series.push_back(std::move(s));
    }
  }
  detail::finish_report(rep);
  return rep;
}

// Derivative bounds. Three series:
//   poly        — random P: || T^{-1/2} P' w ||_p (a_n / n) / || P w ||_p
//   vp_deriv    — || T^{-1/2} (v_n f)' w ||_p (a_n / n) / || T^{1/4} f w ||_p
//   vp_deriv_raw— || (v_n f)' w ||_p (a_n / n) / || T^{3/4} f w ||_p
// The first two gate on slope; the raw form is exploratory and recorded only.
inline ExperimentReport exp_bernstein(PresetContext& ctx,
                                      const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "bernstein";
  rep.threshold = cfg.thresholds.slope;

  const int n_top =
      *std::max_element(cfg.n_approx.begin(), cfg.n_approx.end());

  // One coefficient stream per draw index, shared across every n and both p:
  // each cell evaluates prefixes of the same master vectors, so the per-n
  // maxima range over nested polynomial families and the slope gate sees the
  // trend in n rather than independent draw luck. Entries are i.i.d., so the
  // per-cell marginal distribution is unchanged.
  std::vector<std::vector<double>> master(
      static_cast<std::size_t>(cfg.bernstein_polys));
  {
    auto rng = detail::cell_rng(cfg, ctx, "bernstein", n_top);
    for (auto& m : master) m = detail::random_poly_coeffs(rng, n_top);
  }

  for (double p : cfg.p_approx) {
    SeriesGate s;
    s.key = "poly:p=" + detail::p_label(p);
    // The per-n max of a handful of draws is a noisy order statistic: its
    // fitted slope wanders even when the ratio distribution is flat in n.
    // Report the max (it feeds C_emp) but gate on the slope of the pooled
    // per-draw cells over the same top-half window, which pins the trend
    // with a sqrt(#draws) smaller error.
    s.kind = "slope-pooled";
    std::vector<double> pool_n, pool_v;
    const std::size_t top_start = cfg.n_approx.size() / 2;
    for (std::size_t i = 0; i < cfg.n_approx.size(); ++i) {
      const int n = cfg.n_approx[i];
      const double an = ctx.mrs.a(n);
      double worst = 0.0;
      for (int j = 0; j < cfg.bernstein_polys; ++j) {
        const std::vector<double> q(master[j].begin(),
                                    master[j].begin() + n + 1);
        const std::vector<double> dq =
            series_derivative(ctx.table, q, ctx.proj_rule);
        const double lhs = series_norm(ctx, dq, p, -0.5, n);
        const double rhs = series_norm(ctx, q, p, 0.0, n);
        const double ratio = lhs * an / (n * rhs);
        rep.cells.push_back({rep.id, "poly", double(n), p,
                             "poly#" + std::to_string(j), lhs, rhs, ratio});
        worst = std::max(worst, ratio);
        if (i >= top_start) {
          pool_n.push_back(n);
          pool_v.push_back(ratio);
        }
      }
      s.n.push_back(n);
      s.value.push_back(worst);
    }
    s.slope = detail::log_slope_all(pool_n, pool_v);
    rep.series.push_back(std::move(s));
  }

  const std::vector<TargetFunction> dict = {
      target_sin(),   target_cos(),   target_abs(),
      target_sign(),  target_runge(), target_gauss_bump(0.0, 1.0),
      target_winv_clamped(ctx.spec)};
  for (double p : cfg.p_approx) {
    SeriesGate damped, raw;
    damped.key = "vp_deriv:p=" + detail::p_label(p);
    raw.key = "vp_deriv_raw:p=" + detail::p_label(p);
    raw.kind = "none";
    for (int n : cfg.n_approx) {
      const double an = ctx.mrs.a(n);
      double worst = 0.0, worst_raw = 0.0;
      for (const auto& t : dict) {
        const ExpansionCoeffs& c = shared_coeffs(ctx, t);
        const VpPolynomial vp = vp_mean(c, n);
        const std::vector<double> dv =
            series_derivative(ctx.table, vp.d, ctx.proj_rule);
        const double lhs = series_norm(ctx, dv, p, -0.5, n);
        const double rhs = target_norm(ctx, t, p, 0.25, n_top);
        const double ratio = lhs * an / (n * rhs);
        rep.cells.push_back(
            {rep.id, "vp_deriv", double(n), p, t.name, lhs, rhs, ratio});
        worst = std::max(worst, ratio);

        const double lhs_raw = series_norm(ctx, dv, p, 0.0, n);
        const double rhs_raw = target_norm(ctx, t, p, 0.75, n_top);
        const double ratio_raw = lhs_raw * an / (n * rhs_raw);
        rep.cells.push_back({rep.id, "vp_deriv_raw", double(n), p, t.name,
                             lhs_raw, rhs_raw, ratio_raw});
        worst_raw = std::max(worst_raw, ratio_raw);
      }
      damped.n.push_back(n);
      damped.value.push_back(worst);
      raw.n.push_back(n);
      raw.value.push_back(worst_raw);
    }
    rep.series.push_back(std::move(damped));
    rep.series.push_back(std::move(raw));
  }
  detail::finish_report(rep);
  for (const auto& s : rep.series)
    if (s.kind == "none")
      rep.notes.push_back(s.key + " recorded only; fitted slope " +
                          format_double(s.slope));
  return rep;
}

// Scaled diagonal of the Christoffel-Darboux kernel:
// (a_n / n) sup_x w^2(x) T^{-1/2}(x) sum_{k<n} p_k(x)^2 must stay flat.
inline ExperimentReport exp_kernel_diag(PresetContext& ctx,
                                        const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = "kernel_diag";
  rep.threshold = cfg.thresholds.slope;
  SeriesGate s;
  s.key = "kernel:p=inf";
  for (int n : cfg.n_kernel) {
    auto g = [&ctx, n](double x) {
      return kernel_diag_weighted(ctx.table, n, x);
    };
    const NormResult r =
        weighted_norm(ctx.spec, ctx.mrs, g,
                      make_req(kInf, -0.5, /*includes_w=*/true, n));
    const double an = ctx.mrs.a(n);
    const double value = an / n * r.value;
    rep.cells.push_back(
        {rep.id, "kernel", double(n), kInf, "diagonal", r.value, n / an,
         value});
    if (std::abs(r.argmax) > 0.9 * r.domain_L)
      rep.notes.push_back("n = " + std::to_string(n) +
                          ": sup attained near the domain edge (x = " +
                          format_double(r.argmax) + ", L = " +
                          format_double(r.domain_L) + ")");
    s.n.push_back(n);
    s.value.push_back(value);
  }
  rep.series.push_back(std::move(s));
  detail::finish_report(rep);
  return rep;
}

// Edge-profile functional: the damped-output sup-norm with the output damping
// replaced by the square-root edge profile at level 2n. Boundedness here is
// the sharper, edge-localised statement.
inline ExperimentReport exp_bound_edge(PresetContext& ctx,
                                       const RunConfig& cfg,
                                       const ExperimentReport* uniform) {
  ExperimentReport rep;
  rep.id = "vp_bound_edge";
  rep.threshold = cfg.thresholds.slope;
  SeriesGate s;
  s.key = "edge:p=inf";
  for (int n : cfg.n_lebesgue) {
    const OperatorNormResult r =
        vp_operator_norm(ctx.table, ctx.mrs, n, edge_profile_mode());
    rep.cells.push_back(
        {rep.id, "edge", double(n), kInf, "operator", r.value, 1.0, r.value});
    s.n.push_back(n);
    s.value.push_back(r.value);
  }
  if (uniform != nullptr) {
    for (const auto& us : uniform->series) {
      if (us.key != "damped:p=inf") continue;
      double worst = 0.0;
      for (std::size_t i = 0; i < us.value.size() && i < s.value.size(); ++i)
        if (s.value[i] > 0.0)
          worst = std::max(worst, us.value[i] / s.value[i]);
      rep.notes.push_back(
          "max damped/edge sup-norm ratio over shared n: " +
          format_double(worst));
    }
  }
  rep.series.push_back(std::move(s));
  detail::finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Runner: executes the configured experiments per preset, writes one CSV per
// experiment plus a summary JSON, and aggregates the gate outcome.
// ---------------------------------------------------------------------------

struct PresetRun {
  std::string label;
  std::uint64_t digest = 0;
  std::vector<ExperimentReport> reports;
};

struct RunOutcome {
  bool pass = true;
  std::vector<PresetRun> presets;
  json summary;
};

namespace detail {

inline void write_cells_csv(const std::vector<CellRecord>& cells,
                            const std::string& path) {
  CsvWriter csv(
      {"experiment", "series", "n", "p", "target", "lhs", "rhs", "ratio"});
  for (const auto& c : cells)
    csv.row({c.experiment, c.series, csv_num(c.n), csv_num(c.p), c.target,
             csv_num(c.lhs), csv_num(c.rhs), csv_num(c.ratio)});
  csv.save(path);
}

inline void write_series_csv(const ExperimentReport& rep,
                             const std::string& path) {
  CsvWriter csv({"series", "n", "value"});
  for (const auto& s : rep.series)
    for (std::size_t i = 0; i < s.n.size(); ++i)
      csv.row({s.key, csv_num(s.n[i]), csv_num(s.value[i])});
  csv.save(path);
}

inline json report_to_json(const ExperimentReport& r) {
  json j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["c_emp"] = r.c_emp;
  j["threshold"] = r.threshold;
  j["runtime_s"] = r.runtime_s;
  json series = json::array();
  for (const auto& s : r.series) {
    json sj;
    sj["key"] = s.key;
    sj["kind"] = s.kind;
    sj["gated"] = s.gated;
    sj["pass"] = s.pass;
    sj["slope"] = s.slope;
    sj["n"] = s.n;
    sj["value"] = s.value;
    series.push_back(sj);
  }
  j["series"] = series;
  j["notes"] = r.notes;
  return j;
}

}  // namespace detail

inline ExperimentReport run_experiment(PresetContext& ctx,
                                       const RunConfig& cfg,
                                       const std::string& id,
                                       const ExperimentReport* uniform) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  try {
    if (id == "vp_uniform_bound") rep = exp_uniform_bound(ctx, cfg);
    else if (id == "vp_growth") rep = exp_growth(ctx, cfg);
    else if (id == "vp_convergence") rep = exp_convergence(ctx, cfg);
    else if (id == "favard") rep = exp_favard(ctx, cfg);
    else if (id == "bernstein") rep = exp_bernstein(ctx, cfg);
    else if (id == "kernel_diag") rep = exp_kernel_diag(ctx, cfg);
    else if (id == "vp_bound_edge") rep = exp_bound_edge(ctx, cfg, uniform);
    else throw ConfigError("unknown experiment '" + id + "'");
  } catch (const VpxError& e) {
    rep.id = id;
    rep.pass = false;
    rep.notes.push_back(std::string("aborted: ") + e.what());
  }
  rep.runtime_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return rep;
}

inline RunOutcome run_all(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  RunOutcome out;
  json presets_json = json::array();

  for (const auto& spec : cfg.specs) {
    PresetContext ctx = make_context(spec, cfg);
    PresetRun pr;
    pr.label = ctx.label;
    pr.digest = weight_spec_digest(spec);

    std::string dir;
    if (!out_dir.empty()) {
      dir = out_dir + "/" + ctx.label;
      std::filesystem::create_directories(dir);
    }

    pr.reports.reserve(cfg.experiments.size());
    const ExperimentReport* uniform = nullptr;
    json reports_json = json::array();
    for (const auto& id : cfg.experiments) {
      ExperimentReport rep = run_experiment(ctx, cfg, id, uniform);
      if (!rep.pass) out.pass = false;
      if (!dir.empty()) {
        detail::write_cells_csv(rep.cells, dir + "/" + rep.id + ".csv");
        if (cfg.emit_plots_data)
          detail::write_series_csv(rep, dir + "/plots_" + rep.id + ".csv");
      }
      json rj = detail::report_to_json(rep);
      rj["csv"] = ctx.label + "/" + rep.id + ".csv";
      reports_json.push_back(rj);
      pr.reports.push_back(std::move(rep));
      if (pr.reports.back().id == "vp_uniform_bound")
        uniform = &pr.reports.back();
    }

    json pj;
    pj["name"] = ctx.label;
    pj["digest"] = to_hex(pr.digest);
    pj["table"] = {{"n_max", ctx.table.n_max},
                   {"L", ctx.table.disc.L},
                   {"M", ctx.table.disc.nodes},
                   {"half_panels", ctx.table.disc.half_panels},
                   {"panel_order", ctx.table.disc.order},
                   {"coeff_K", ctx.coeff_K}};
    pj["experiments"] = reports_json;
    presets_json.push_back(pj);
    out.presets.push_back(std::move(pr));
  }

  out.summary["suite"] = "vpx run";
  out.summary["config"] = run_config_to_json(cfg);
  out.summary["overall_pass"] = out.pass;
  out.summary["presets"] = presets_json;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    save_json(out.summary, out_dir + "/summary.json");
  }
  return out;
}

}  // namespace vpx
