#pragma once

// JSON (de)serialization for weight specs, recurrence tables, and condition
// reports, plus a deterministic CSV writer. All doubles are emitted in
// shortest round-trippable form, so files are bit-stable across runs on the
// same platform.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpx/common.hpp"
#include "vpx/orthopoly.hpp"
#include "vpx/presets.hpp"
#include "vpx/weights.hpp"

namespace vpx {

using json = nlohmann::json;

inline std::string family_name(WeightFamily f) {
  switch (f) {
    case WeightFamily::Freud: return "freud";
    case WeightFamily::FreudGeneral: return "freud_general";
    case WeightFamily::Erdos: return "erdos";
  }
  return "freud";
}

inline WeightFamily family_from_name(const std::string& s) {
  if (s == "freud") return WeightFamily::Freud;
  if (s == "freud_general") return WeightFamily::FreudGeneral;
  if (s == "erdos") return WeightFamily::Erdos;
  throw ConfigError("unknown weight family: " + s);
}

inline json weight_spec_to_json(const WeightSpec& s) {
  json j;
  j["family"] = family_name(s.family);
  j["alpha"] = s.alpha;
  j["u"] = s.u;
  j["ell"] = s.ell;
  j["scale"] = s.scale;
  if (s.lambda_class) j["lambda_class"] = *s.lambda_class;
  if (!s.name.empty()) j["name"] = s.name;
  return j;
}

inline WeightSpec weight_spec_from_json(const json& j) {
  // A bare {"preset": "..."} form resolves to a shipped preset, with field
  // overrides applied on top.
  WeightSpec s;
  if (j.contains("preset")) s = preset(j.at("preset").get<std::string>());
  if (j.contains("family"))
    s.family = family_from_name(j.at("family").get<std::string>());
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("u")) s.u = j.at("u").get<double>();
  if (j.contains("ell")) s.ell = j.at("ell").get<int>();
  if (j.contains("scale")) s.scale = j.at("scale").get<double>();
  if (j.contains("lambda_class"))
    s.lambda_class = j.at("lambda_class").get<double>();
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  s.validate();
  return s;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline WeightSpec load_weight_spec(const std::string& path) {
  return weight_spec_from_json(load_json_file(path));
}

// Digest of the canonical spec serialization; stamped into reports.
inline std::uint64_t weight_spec_digest(const WeightSpec& s) {
  return fnv1a64(weight_spec_to_json(s).dump());
}

inline json condition_report_to_json(const ConditionReport& rep) {
  json j;
  j["subject"] = rep.subject;
  j["all_pass"] = rep.all_pass();
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj;
    cj["id"] = c.id;
    cj["pass"] = c.pass;
    cj["constant"] = c.constant;
    cj["witness_x"] = c.witness_x;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  return j;
}

inline json recurrence_table_to_json(const RecurrenceTable& t) {
  json j;
  j["spec"] = weight_spec_to_json(t.spec);
  j["n_max"] = t.n_max;
  j["p0"] = t.p0;
  j["alpha_k"] = t.alpha;
  j["beta_k"] = t.beta;
  j["L"] = t.disc.L;
  j["M"] = t.disc.nodes;
  j["half_panels"] = t.disc.half_panels;
  j["panel_order"] = t.disc.order;
  return j;
}

inline RecurrenceTable recurrence_table_from_json(const json& j) {
  RecurrenceTable t;
  t.spec = weight_spec_from_json(j.at("spec"));
  t.n_max = j.at("n_max").get<int>();
  t.p0 = j.at("p0").get<double>();
  t.alpha = j.at("alpha_k").get<std::vector<double>>();
  t.beta = j.at("beta_k").get<std::vector<double>>();
  t.disc.L = j.at("L").get<double>();
  t.disc.nodes = j.at("M").get<std::size_t>();
  t.disc.half_panels = j.at("half_panels").get<int>();
  t.disc.order = j.at("panel_order").get<int>();
  if (t.alpha.size() != static_cast<std::size_t>(t.n_max) + 1 ||
      t.beta.size() != static_cast<std::size_t>(t.n_max) + 1)
    throw ConfigError("recurrence table: coefficient arrays have wrong length");
  return t;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// Deterministic CSV assembly: fixed column order, %.17g doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header)
      : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) body_ << ',';
      body_ << header[i];
    }
    body_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw ConfigError("CsvWriter: wrong cell count");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ << ',';
      body_ << cells[i];
    }
    body_ << '\n';
  }
  std::string str() const { return body_.str(); }
  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << body_.str();
  }

 private:
  std::size_t columns_;
  std::ostringstream body_;
};

inline std::string csv_num(double v) { return format_double(v); }

}  // namespace vpx
