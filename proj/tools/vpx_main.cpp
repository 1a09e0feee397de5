// vpx: command-line front end for the VP-mean numerics library.
//
// Subcommands:
//   mrs         scale points a_n, strip widths delta_n, and T(a_n) as CSV
//   recurrence  orthonormal recurrence table as JSON (bit-stable)
//   conditions  weight-class condition checks as JSON
//   approx      sample f, v_n(f), w, and the error on a grid as CSV
//   norm        one weighted L^p norm with its quadrature budget as JSON
//   run         the full experiment suite; exit code reflects the gates

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpx/common.hpp"
#include "vpx/harness.hpp"
#include "vpx/io.hpp"
#include "vpx/mrs.hpp"
#include "vpx/norms.hpp"
#include "vpx/operators.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/presets.hpp"
#include "vpx/targets.hpp"
#include "vpx/weights.hpp"

namespace {

vpx::WeightSpec spec_from_cli(const std::string& preset_name,
                              const std::string& spec_file) {
  if (!spec_file.empty()) return vpx::load_weight_spec(spec_file);
  return vpx::preset(preset_name);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw vpx::ConfigError("cannot write file: " + out_path);
  f << text;
}

double parse_p(const std::string& s) {
  if (s == "inf") return vpx::kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v >= 1.0) return v;
  } catch (const std::exception&) {
  }
  throw vpx::ConfigError("--p expects a number >= 1 or 'inf', got '" + s +
                         "'");
}

int cmd_mrs(const vpx::WeightSpec& spec, const std::vector<double>& n_list,
            const std::string& out_path) {
  vpx::MrsTable mrs(spec);
  vpx::CsvWriter csv({"n", "a_n", "delta_n", "T_at_a_n"});
  for (double n : n_list) {
    if (!(n >= 0.5)) throw vpx::ConfigError("mrs: n entries must be >= 0.5");
    const double an = mrs.ensure(n);
    csv.row({vpx::csv_num(n), vpx::csv_num(an),
             vpx::csv_num(vpx::delta_n(mrs, n)),
             vpx::csv_num(vpx::eval_T(spec, an))});
  }
  emit(csv.str(), out_path);
  return 0;
}

int cmd_recurrence(const vpx::WeightSpec& spec, int n_max,
                   const std::string& out_path) {
  vpx::MrsTable mrs(spec);
  const vpx::RecurrenceTable table = vpx::build_recurrence(spec, mrs, n_max);
  const std::string text = vpx::recurrence_table_to_json(table).dump(2) + "\n";
  emit(text, out_path);
  return 0;
}

int cmd_conditions(const vpx::WeightSpec& spec, const std::string& out_path) {
  vpx::MrsTable mrs(spec);
  const std::vector<double> grid = vpx::condition_grid(spec);
  const std::vector<double> n_list = {1, 2, 4, 8, 16, 32, 64};

  vpx::json j;
  j["spec"] = vpx::weight_spec_to_json(spec);
  vpx::json reports = vpx::json::array();
  bool all = true;
  for (const auto& rep :
       {vpx::check_class_conditions(spec, grid),
        vpx::check_T_shift_stability(spec, grid),
        vpx::check_growth_compatibility(spec, mrs, n_list)}) {
    all = all && rep.all_pass();
    reports.push_back(vpx::condition_report_to_json(rep));
  }
  j["reports"] = reports;
  j["all_pass"] = all;
  emit(j.dump(2) + "\n", out_path);
  return all ? 0 : 1;
}

int cmd_approx(const vpx::WeightSpec& spec, const std::string& f_desc, int n,
               int K, int grid, double L, const std::string& out_path) {
  if (n < 1) throw vpx::ConfigError("approx: --n must be >= 1");
  if (K == 0) K = 2 * n;
  if (K < 2 * n) throw vpx::ConfigError("approx: need --K >= 2n");
  if (grid < 2) throw vpx::ConfigError("approx: --grid must be >= 2");
  const vpx::TargetFunction target = vpx::parse_target(f_desc, spec);

  vpx::MrsTable mrs(spec);
  mrs.prepare({double(n), double(K)});
  const vpx::RecurrenceTable table = vpx::build_recurrence(spec, mrs, K);
  vpx::FourierOptions opt;
  opt.breakpoints = target.kinks(1.5 * mrs.ensure(2.0 * K));
  const vpx::ExpansionCoeffs coeffs =
      vpx::fourier_coeffs(table, mrs, target.f, K, opt);
  const vpx::VpPolynomial vp = vpx::vp_mean(coeffs, n);

  if (L <= 0.0) L = 1.1 * mrs.ensure(2.0 * n);
  vpx::CsvWriter csv({"x", "f", "vnf", "w", "error"});
  for (int i = 0; i < grid; ++i) {
    const double x = -L + 2.0 * L * i / (grid - 1.0);
    const double fx = target.f(x);
    const double vx = vpx::vp_eval(table, vp, x);
    csv.row({vpx::csv_num(x), vpx::csv_num(fx), vpx::csv_num(vx),
             vpx::csv_num(vpx::weight_w(spec, x)), vpx::csv_num(fx - vx)});
  }
  emit(csv.str(), out_path);
  return 0;
}

int cmd_norm(const vpx::WeightSpec& spec, const std::string& f_desc,
             const std::string& p_str, const std::string& mode, double n_ctx,
             double L, const std::string& out_path) {
  const vpx::TargetFunction target = vpx::parse_target(f_desc, spec);
  const double p = parse_p(p_str);
  const double t_exp =
      vpx::weight_mode_exponent(vpx::weight_mode_from_name(mode));

  vpx::MrsTable mrs(spec);
  vpx::NormRequest req;
  req.p = p;
  req.t_exponent = t_exp;
  req.n_ctx = n_ctx;
  req.L = L;
  if (L <= 0.0 && n_ctx >= 1.0)
    req.breakpoints = target.kinks(1.5 * mrs.ensure(2.0 * n_ctx));
  else if (L > 0.0)
    req.breakpoints = target.kinks(L);
  const vpx::NormResult r = vpx::weighted_norm(spec, mrs, target.f, req);

  vpx::json j;
  j["spec"] = vpx::weight_spec_to_json(spec);
  j["target"] = target.name;
  j["p"] = (p == vpx::kInf) ? vpx::json("inf") : vpx::json(p);
  j["mode"] = mode;
  j["value"] = r.value;
  j["budget"] = {{"body", r.body},
                 {"tail", r.tail},
                 {"refine_delta", r.refine_delta},
                 {"domain_L", r.domain_L},
                 {"argmax", r.argmax}};
  emit(j.dump(2) + "\n", out_path);
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            bool emit_plots, bool have_seed, std::uint64_t seed) {
  vpx::RunConfig cfg = config_path.empty()
                           ? vpx::default_run_config()
                           : vpx::run_config_from_json(
                                 vpx::load_json_file(config_path));
  if (emit_plots) cfg.emit_plots_data = true;
  if (have_seed) cfg.seed = seed;

  const vpx::RunOutcome outcome = vpx::run_all(cfg, out_dir);
  for (const auto& pr : outcome.presets) {
    for (const auto& rep : pr.reports) {
      std::printf("[%s] %-17s %s  C_emp=%-12.6g (%.1f s)\n", pr.label.c_str(),
                  rep.id.c_str(), rep.pass ? "pass" : "FAIL", rep.c_emp,
                  rep.runtime_s);
      for (const auto& note : rep.notes)
        std::printf("    note: %s\n", note.c_str());
    }
  }
  std::printf("overall: %s\n", outcome.pass ? "PASS" : "FAIL");
  if (!out_dir.empty())
    std::printf("reports written to %s/summary.json\n", out_dir.c_str());
  return outcome.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de la Vallee Poussin means for exponential weights on R"};
  app.require_subcommand(1);
  // Let global options (--preset/--spec) appear after the subcommand name.
  app.fallthrough();

  std::string preset_name = "freud-hermite";
  std::string spec_file;
  app.add_option("--preset", preset_name, "shipped weight preset name")
      ->capture_default_str();
  app.add_option("--spec", spec_file,
                 "weight spec JSON file (overrides --preset)");

  auto* sub_mrs =
      app.add_subcommand("mrs", "scale points and strip widths as CSV");
  std::vector<double> n_list = {1, 2, 4, 8, 16, 32, 64, 128};
  std::string mrs_out;
  sub_mrs->add_option("--n-list", n_list, "n values (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  sub_mrs->add_option("--out", mrs_out, "output file (default: stdout)");

  auto* sub_rec =
      app.add_subcommand("recurrence", "recurrence coefficients as JSON");
  int rec_n_max = 64;
  std::string rec_out;
  sub_rec->add_option("--n-max", rec_n_max, "largest degree")
      ->capture_default_str();
  sub_rec->add_option("--out", rec_out, "output file (default: stdout)");

  auto* sub_cond =
      app.add_subcommand("conditions", "weight-class condition checks");
  std::string cond_out;
  sub_cond->add_option("--out", cond_out, "output file (default: stdout)");

  auto* sub_approx = app.add_subcommand(
      "approx", "sample f, v_n(f), w, and the error on a grid");
  std::string approx_f = "builtin:sin";
  int approx_n = 16, approx_K = 0, approx_grid = 257;
  double approx_L = 0.0;
  std::string approx_out;
  sub_approx
      ->add_option("--f", approx_f,
                   "target: builtin:{sin,cos,abs,sign,runge,winv,"
                   "gauss-bump(c,s),poly(c0,c1,...),characteristic(a,b)}")
      ->capture_default_str();
  sub_approx->add_option("--n", approx_n, "VP index n")->capture_default_str();
  sub_approx->add_option("--K", approx_K,
                         "expansion length (default 2n)");
  sub_approx->add_option("--grid", approx_grid, "number of sample points")
      ->capture_default_str();
  sub_approx->add_option("--L", approx_L,
                         "half-width of the grid (default 1.1 a_{2n})");
  sub_approx->add_option("--out", approx_out, "output file (default: stdout)");

  auto* sub_norm =
      app.add_subcommand("norm", "one weighted L^p norm with its budget");
  std::string norm_f = "builtin:sin", norm_p = "2", norm_mode = "w";
  double norm_nctx = 32.0, norm_L = 0.0;
  std::string norm_out;
  sub_norm->add_option("--f", norm_f, "target (same forms as approx)")
      ->capture_default_str();
  sub_norm->add_option("--p", norm_p, "exponent: number >= 1 or 'inf'")
      ->capture_default_str();
  sub_norm
      ->add_option("--mode", norm_mode,
                   "multiplier: w | w_over_T4 | T4_w")
      ->capture_default_str();
  sub_norm
      ->add_option("--n-ctx", norm_nctx,
                   "degree context for the automatic domain")
      ->capture_default_str();
  sub_norm->add_option("--L", norm_L, "explicit body domain half-width");
  sub_norm->add_option("--out", norm_out, "output file (default: stdout)");

  auto* sub_run = app.add_subcommand("run", "full experiment suite");
  std::string run_config, run_out = "out";
  bool run_plots = false;
  std::uint64_t run_seed = 0;
  auto* seed_opt =
      sub_run->add_option("--seed", run_seed, "override the config seed");
  sub_run->add_option("--config", run_config, "run config JSON file");
  sub_run->add_option("--out", run_out, "output directory")
      ->capture_default_str();
  sub_run->add_flag("--emit-plots-data", run_plots,
                    "also write per-series plot data CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_run->parsed())
      return cmd_run(run_config, run_out, run_plots, seed_opt->count() > 0,
                     run_seed);
    const vpx::WeightSpec spec = spec_from_cli(preset_name, spec_file);
    if (sub_mrs->parsed()) return cmd_mrs(spec, n_list, mrs_out);
    if (sub_rec->parsed()) return cmd_recurrence(spec, rec_n_max, rec_out);
    if (sub_cond->parsed()) return cmd_conditions(spec, cond_out);
    if (sub_approx->parsed())
      return cmd_approx(spec, approx_f, approx_n, approx_K, approx_grid,
                        approx_L, approx_out);
    if (sub_norm->parsed())
      return cmd_norm(spec, norm_f, norm_p, norm_mode, norm_nctx, norm_L,
                      norm_out);
  } catch (const vpx::ConfigError& e) {
    std::fprintf(stderr, "vpx: %s\n", e.what());
    return 2;
  } catch (const vpx::VpxError& e) {
    std::fprintf(stderr, "vpx: %s\n", e.what());
    return 3;
  }
  return 2;
}
