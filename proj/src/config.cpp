// Copyright 2026 the optodark authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optodark/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "optodark/model.hpp"

namespace optodark {

namespace {

struct Value {
  std::string text;
  int line = 0;
};

using KeyValues = std::map<std::string, Value>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.g_wm",
      "model.omega1_wm",
      "model.omega2_wm",
      "model.delta1_wm",
      "model.delta2_wm",
      "model.gamma_c_wm",
      "model.gamma_m_wm",
      "model.n_photon_levels",
      "model.n_phonon_levels",
      "darkstate.n_max",
      "darkstate.xi",
      "evolution.t_final_per_wm",
      "evolution.dt_per_wm",
      "evolution.sample_every",
      "evolution.use_effective",
      "evolution.co_rotating_target",
      "evolution.leak_threshold",
      "evolution.trace_abort",
      "evolution.check_positivity",
      "evolution.g_deviation",
      "evolution.deviation_target",
      "evolution.convergence_check",
      "evolution.convergence_tolerance",
      "validate.max_drive_over_margin",
      "validate.resonance_tolerance_wm",
      "output.csv",
      "output.metadata",
  };
  return keys;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

void insert(KeyValues& kv, const std::string& source, const std::string& key, Value v) {
  if (!known_keys().contains(key)) throw ConfigError(source, v.line, "unknown key '" + key + "'");
  if (kv.contains(key)) throw ConfigError(source, v.line, "duplicate key '" + key + "'");
  kv.emplace(key, std::move(v));
}

KeyValues parse_text(std::string_view text, const std::string& source) {
  KeyValues kv;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    // A comment starts at '#' or ';' at line start or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"model", "darkstate", "evolution", "validate", "output"};
      if (!sections.contains(section)) throw ConfigError(source, line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected key = value");
    if (section.empty()) throw ConfigError(source, line_no, "key outside of any [section]");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "empty key");
    if (value.empty()) throw ConfigError(source, line_no, "empty value for '" + key + "'");
    insert(kv, source, section + "." + key, {value, line_no});
  }
  return kv;
}

KeyValues parse_json(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  const nlohmann::json& root = doc.contains("config") ? doc.at("config") : doc;
  if (!root.is_object()) throw ConfigError(source, 0, "JSON configuration must be an object");
  KeyValues kv;
  for (const auto& [section, body] : root.items()) {
    if (!body.is_object()) throw ConfigError(source, 0, "section '" + section + "' must be an object");
    for (const auto& [key, v] : body.items()) {
      std::string s;
      if (v.is_string()) s = v.get<std::string>();
      else if (v.is_boolean()) s = v.get<bool>() ? "true" : "false";
      else if (v.is_number()) s = v.dump();
      else throw ConfigError(source, 0, "unsupported value for '" + section + "." + key + "'");
      insert(kv, source, section + "." + key, {s, 0});
    }
  }
  return kv;
}

class Reader {
 public:
  Reader(const KeyValues& kv, const std::string& source, std::vector<std::string>& defaulted)
      : kv_(kv), source_(source), defaulted_(defaulted) {}

  bool has(const std::string& key) const { return kv_.contains(key); }

  double number(const std::string& key) const {
    const Value& v = at(key);
    double out = 0.0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    if (*b == '+') ++b;
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e) throw ConfigError(source_, v.line, "'" + key + "' is not a number: " + v.text);
    return out;
  }

  double number(const std::string& key, double fallback) const {
    if (has(key)) return number(key);
    defaulted_.push_back(key);
    return fallback;
  }

  int integer(const std::string& key) const {
    const Value& v = at(key);
    int out = 0;
    const auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.text.data() + v.text.size()) {
      throw ConfigError(source_, v.line, "'" + key + "' is not an integer: " + v.text);
    }
    return out;
  }

  int integer(const std::string& key, int fallback) const {
    if (has(key)) return integer(key);
    defaulted_.push_back(key);
    return fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) {
      defaulted_.push_back(key);
      return fallback;
    }
    const Value& v = at(key);
    if (v.text == "true" || v.text == "yes" || v.text == "1") return true;
    if (v.text == "false" || v.text == "no" || v.text == "0") return false;
    throw ConfigError(source_, v.line, "'" + key + "' is not a boolean: " + v.text);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) {
      defaulted_.push_back(key);
      return fallback;
    }
    return at(key).text;
  }

  int line(const std::string& key) const { return has(key) ? at(key).line : 0; }

  const Value& at(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(source_, 0, "missing required key '" + key + "'");
    return it->second;
  }

 private:
  const KeyValues& kv_;
  const std::string& source_;
  std::vector<std::string>& defaulted_;
};

RunConfig resolve(const KeyValues& kv, const std::string& source) {
  RunConfig cfg;
  Reader r(kv, source, cfg.defaulted);

  cfg.n_max = r.integer("darkstate.n_max");
  if (cfg.n_max < 1 || cfg.n_max > kMaxMagicIndex) {
    throw ConfigError(source, r.line("darkstate.n_max"), "darkstate.n_max must lie in [1, " + std::to_string(kMaxMagicIndex) + "]");
  }

  ModelParams& m = cfg.evolution.params;
  m.g = r.has("model.g_wm") ? r.number("model.g_wm") : (cfg.defaulted.push_back("model.g_wm"), find_gn(cfg.n_max));
  m.omega1_amp = r.number("model.omega1_wm");
  m.omega2_amp = r.number("model.omega2_wm");
  const Detunings det = resonance_detunings(m.g);
  m.delta1 = r.number("model.delta1_wm", det.delta1);
  m.delta2 = r.number("model.delta2_wm", det.delta2);
  m.gamma_c = r.number("model.gamma_c_wm", 0.0);
  m.gamma_m = r.number("model.gamma_m_wm", 0.0);
  m.n_photon_levels = r.integer("model.n_photon_levels", 3);
  m.n_phonon_levels = r.integer("model.n_phonon_levels", default_phonon_levels(cfg.n_max));
  if (const auto problems = m.problems(); !problems.empty()) throw ConfigError(source, 0, "[model] " + problems.front());

  if (r.has("darkstate.xi")) cfg.xi = r.number("darkstate.xi");

  EvolutionConfig& e = cfg.evolution;
  e.t_final = r.number("evolution.t_final_per_wm");
  e.dt = r.number("evolution.dt_per_wm", 0.02);
  e.sample_every = r.integer("evolution.sample_every", 500);
  e.use_effective = r.boolean("evolution.use_effective", false);
  e.co_rotating_target = r.boolean("evolution.co_rotating_target", true);
  e.leak_threshold = r.number("evolution.leak_threshold", 1e-3);
  e.trace_abort = r.number("evolution.trace_abort", 1e-6);
  e.check_positivity = r.boolean("evolution.check_positivity", true);
  cfg.g_deviation = r.number("evolution.g_deviation", 0.0);
  const std::string dev_target = r.text("evolution.deviation_target", "recomputed");
  if (dev_target == "recomputed") cfg.deviation_target = DeviationTarget::recomputed;
  else if (dev_target == "nominal") cfg.deviation_target = DeviationTarget::nominal;
  else throw ConfigError(source, r.line("evolution.deviation_target"), "deviation_target must be 'recomputed' or 'nominal'");
  cfg.convergence_check = r.boolean("evolution.convergence_check", false);
  cfg.convergence_tolerance = r.number("evolution.convergence_tolerance", 5e-3);

  cfg.max_drive_over_margin = r.number("validate.max_drive_over_margin", 0.2);
  cfg.resonance_tolerance = r.number("validate.resonance_tolerance_wm", 5e-3);

  cfg.csv_path = r.text("output.csv", "run.csv");
  cfg.metadata_path = r.text("output.metadata", "run.json");

  try {
    cfg.refresh_target();
    e.validate();
    if (!(std::abs(cfg.g_deviation) < 0.2)) throw std::invalid_argument("g_deviation must satisfy |d| < 0.2");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(source, 0, ex.what());
  }
  return cfg;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

double RunConfig::drive_ratio() const {
  const ModelParams& m = evolution.params;
  if (m.omega2_amp > 0.0) return m.omega1_amp / m.omega2_amp;
  if (m.omega1_amp == 0.0) return 0.0;
  throw std::invalid_argument("omega2 = 0 with omega1 > 0 admits no dark state");
}

void RunConfig::refresh_target() {
  evolution.target = dark_state(n_max, xi.value_or(evolution.params.g), drive_ratio());
}

EvolutionConfig RunConfig::effective_evolution() const {
  if (g_deviation == 0.0) return evolution;
  return deviated_config(evolution, g_deviation, deviation_target);
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  const std::string t = trim(text);
  const KeyValues kv = (!t.empty() && t.front() == '{') ? parse_json(t, source) : parse_text(text, source);
  return resolve(kv, source);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

nlohmann::json to_json(const RunConfig& cfg) {
  const ModelParams& m = cfg.evolution.params;
  const EvolutionConfig& e = cfg.evolution;
  nlohmann::json j;
  j["model"] = {
      {"g_wm", m.g},
      {"omega1_wm", m.omega1_amp},
      {"omega2_wm", m.omega2_amp},
      {"delta1_wm", m.delta1},
      {"delta2_wm", m.delta2},
      {"gamma_c_wm", m.gamma_c},
      {"gamma_m_wm", m.gamma_m},
      {"n_photon_levels", m.n_photon_levels},
      {"n_phonon_levels", m.n_phonon_levels},
  };
  j["darkstate"] = {{"n_max", cfg.n_max}, {"xi", cfg.xi.value_or(m.g)}};
  j["evolution"] = {
      {"t_final_per_wm", e.t_final},
      {"dt_per_wm", e.dt},
      {"sample_every", e.sample_every},
      {"use_effective", e.use_effective},
      {"co_rotating_target", e.co_rotating_target},
      {"leak_threshold", e.leak_threshold},
      {"trace_abort", e.trace_abort},
      {"check_positivity", e.check_positivity},
      {"g_deviation", cfg.g_deviation},
      {"deviation_target", cfg.deviation_target == DeviationTarget::recomputed ? "recomputed" : "nominal"},
      {"convergence_check", cfg.convergence_check},
      {"convergence_tolerance", cfg.convergence_tolerance},
  };
  j["validate"] = {{"max_drive_over_margin", cfg.max_drive_over_margin},
                   {"resonance_tolerance_wm", cfg.resonance_tolerance}};
  j["output"] = {{"csv", cfg.csv_path}, {"metadata", cfg.metadata_path}};
  return j;
}

}  // namespace optodark
