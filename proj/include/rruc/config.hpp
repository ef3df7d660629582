// Copyright 2026 The RRUC Authors
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

#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rruc/constraints_runtime.hpp"
#include "rruc/replay.hpp"
#include "rruc/sim.hpp"

namespace rruc {

// ---------------------------------------------------------------------------
// TOML subset: [table] headers, key = value, strings, numbers, booleans and
// single-line arrays of those. Comments start with '#'. Dotted keys and inline
// tables are rejected.

namespace detail {

class TomlReader {
 public:
  explicit TomlReader(std::string text) : text_(std::move(text)) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      line_text_ = raw;
      pos_ = 0;
      skip_ws();
      if (done()) continue;
      if (peek() == '[') {
        ++pos_;
        skip_ws();
        const std::string name = bare_key();
        skip_ws();
        expect(']');
        end_of_line();
        if (root.contains(name)) fail("table [" + name + "] defined twice");
        root[name] = nlohmann::json::object();
        table = &root[name];
        continue;
      }
      const std::string key = bare_key();
      skip_ws();
      expect('=');
      skip_ws();
      if (table->contains(key)) fail("key '" + key + "' defined twice");
      (*table)[key] = value();
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("config line " + std::to_string(line_) + ": " + msg);
  }
  bool done() const { return pos_ >= line_text_.size() || line_text_[pos_] == '#'; }
  char peek() const { return pos_ < line_text_.size() ? line_text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < line_text_.size() && (line_text_[pos_] == ' ' || line_text_[pos_] == '\t' || line_text_[pos_] == '\r')) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void end_of_line() {
    skip_ws();
    if (!done()) fail("unexpected trailing text");
  }
  std::string bare_key() {
    const std::size_t start = pos_;
    while (pos_ < line_text_.size() && (std::isalnum(static_cast<unsigned char>(line_text_[pos_])) || line_text_[pos_] == '_' || line_text_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a bare key");
    return line_text_.substr(start, pos_ - start);
  }
  nlohmann::json value() {
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') {
      ++pos_;
      nlohmann::json arr = nlohmann::json::array();
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      for (;;) {
        skip_ws();
        arr.push_back(value());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          if (peek() == ']') {
            ++pos_;
            return arr;
          }
          continue;
        }
        expect(']');
        return arr;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < line_text_.size() && !std::isspace(static_cast<unsigned char>(line_text_[pos_])) && line_text_[pos_] != ',' &&
           line_text_[pos_] != ']' && line_text_[pos_] != '#')
      ++pos_;
    std::string tok = line_text_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::erase(tok, '_');
    if (tok.empty()) fail("missing value");
    try {
      std::size_t used = 0;
      const bool integral = tok.find_first_of(".eE") == std::string::npos || tok.starts_with("0x");
      if (integral) {
        const long long v = std::stoll(tok, &used, 0);
        if (used == tok.size()) return v;
      } else {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      }
    } catch (const std::logic_error&) {
    }
    fail("cannot parse value '" + tok + "'");
  }
  std::string string_value() {
    expect('"');
    std::string out;
    while (pos_ < line_text_.size() && line_text_[pos_] != '"') {
      char c = line_text_[pos_++];
      if (c == '\\') {
        if (pos_ >= line_text_.size()) break;
        const char e = line_text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    expect('"');
    return out;
  }

  std::string text_;
  std::string line_text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace detail

inline nlohmann::json parse_toml(const std::string& text) { return detail::TomlReader(text).parse(); }

inline nlohmann::json load_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

// ---------------------------------------------------------------------------

/// Resolved run configuration. Sources: a fleet file or a synthetic fleet of
/// `fleet_multiplier` base copies, and a demand file or a synthetic trace of
/// `days` days scaled to that fleet.
struct RunConfig {
  UcModel model = UcModel::runtime;
  std::optional<std::string> fleet_file;
  int fleet_multiplier = 1;
  std::optional<std::string> demand_file;
  int days = 8;
  int dt = 5;
  double sigma_gw = kReferenceSigmaMw / 1000.0;  // at the 22-copy reference size
  double beta = 0.001;
  RelaxConfig relax;
  SweepOptions sweep;
  StartTypeThresholds thresholds;
  std::vector<int> multipliers{1, 2, 4, 8, 16};
  std::size_t oracle_units = 12;
  std::size_t oracle_instances = 50;
  std::string out = "out";
  std::uint64_t seed = 0;

  UcConfig uc_config() const {
    UcConfig c;
    c.relax = relax;
    c.sweep = sweep;
    c.thresholds = thresholds;
    c.beta = beta;
    return c;
  }
};

namespace detail {

template <class T>
T toml_get(const nlohmann::json& table, const std::string& where, const char* key) {
  try {
    return table.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("config " + where + "." + key + " has the wrong type");
  }
}

inline void check_keys(const nlohmann::json& table, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!table.is_object()) throw FormatError("config [" + where + "] must be a table");
  for (const auto& [k, v] : table.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw FormatError("unknown config key " + where + "." + k);
  }
}

}  // namespace detail

/// Overlays a parsed TOML document onto `cfg`. Unknown tables or keys are errors.
inline void apply_toml(RunConfig& cfg, const nlohmann::json& doc) {
  using detail::check_keys;
  using detail::toml_get;
  detail::check_keys(doc, "root", {"run", "fleet", "demand", "relax", "sweep", "ramp", "bench", "oracle"});
  std::optional<std::string> profile;
  bool ramp_model = false;
  if (doc.contains("run")) {
    const auto& t = doc["run"];
    check_keys(t, "run", {"model", "seed", "out", "dt", "days"});
    if (t.contains("model")) {
      const auto m = toml_get<std::string>(t, "run", "model");
      if (m == "ramp") {
        ramp_model = true;
      } else {
        cfg.model = model_from_string(m);
      }
    }
    if (t.contains("seed")) cfg.seed = toml_get<std::uint64_t>(t, "run", "seed");
    if (t.contains("out")) cfg.out = toml_get<std::string>(t, "run", "out");
    if (t.contains("dt")) cfg.dt = toml_get<int>(t, "run", "dt");
    if (t.contains("days")) cfg.days = toml_get<int>(t, "run", "days");
  }
  if (doc.contains("fleet")) {
    const auto& t = doc["fleet"];
    check_keys(t, "fleet", {"file", "multiplier"});
    if (t.contains("file") && t.contains("multiplier")) throw FormatError("config [fleet] takes either file or multiplier");
    if (t.contains("file")) cfg.fleet_file = toml_get<std::string>(t, "fleet", "file");
    if (t.contains("multiplier")) cfg.fleet_multiplier = toml_get<int>(t, "fleet", "multiplier");
  }
  if (doc.contains("demand")) {
    const auto& t = doc["demand"];
    check_keys(t, "demand", {"file", "sigma_gw"});
    if (t.contains("file")) cfg.demand_file = toml_get<std::string>(t, "demand", "file");
    if (t.contains("sigma_gw")) cfg.sigma_gw = toml_get<double>(t, "demand", "sigma_gw");
  }
  if (doc.contains("relax")) {
    const auto& t = doc["relax"];
    check_keys(t, "relax", {"tol", "max_outer", "max_inner", "max_stalled"});
    if (t.contains("tol")) cfg.relax.tol = toml_get<double>(t, "relax", "tol");
    if (t.contains("max_outer")) cfg.relax.max_outer = toml_get<int>(t, "relax", "max_outer");
    if (t.contains("max_inner")) cfg.relax.max_inner = toml_get<int>(t, "relax", "max_inner");
    if (t.contains("max_stalled")) cfg.relax.max_stalled = toml_get<int>(t, "relax", "max_stalled");
  }
  if (doc.contains("sweep")) {
    const auto& t = doc["sweep"];
    check_keys(t, "sweep", {"parallel", "max_width"});
    if (t.contains("parallel")) cfg.sweep.parallel = toml_get<bool>(t, "sweep", "parallel");
    if (t.contains("max_width")) {
      const auto w = toml_get<long long>(t, "sweep", "max_width");
      cfg.sweep.max_width = w <= 0 ? kUnlimitedWidth : static_cast<std::size_t>(w);
    }
  }
  if (doc.contains("ramp")) {
    const auto& t = doc["ramp"];
    check_keys(t, "ramp", {"profile", "beta"});
    if (t.contains("profile")) profile = toml_get<std::string>(t, "ramp", "profile");
    if (t.contains("beta")) cfg.beta = toml_get<double>(t, "ramp", "beta");
  }
  if (doc.contains("bench")) {
    const auto& t = doc["bench"];
    check_keys(t, "bench", {"multipliers"});
    if (t.contains("multipliers")) cfg.multipliers = toml_get<std::vector<int>>(t, "bench", "multipliers");
  }
  if (doc.contains("oracle")) {
    const auto& t = doc["oracle"];
    check_keys(t, "oracle", {"units", "instances"});
    if (t.contains("units")) cfg.oracle_units = toml_get<std::size_t>(t, "oracle", "units");
    if (t.contains("instances")) cfg.oracle_instances = toml_get<std::size_t>(t, "oracle", "instances");
  }
  if (ramp_model) {
    const RampKind k = ramp_kind_from_string(profile.value_or("piecewise"));
    cfg.model = k == RampKind::smooth ? UcModel::ramp_smooth : UcModel::ramp_piecewise;
  } else if (profile && cfg.model != UcModel::runtime) {
    const RampKind k = ramp_kind_from_string(*profile);
    cfg.model = k == RampKind::smooth ? UcModel::ramp_smooth : UcModel::ramp_piecewise;
  }
}

/// Range and consistency checks shared by the CLI and config loading.
inline void validate(const RunConfig& c) {
  if (c.dt <= 0 || 60 % c.dt != 0) throw ArgumentError("dt must be a positive divisor of 60 minutes");
  if (c.days < 2) throw ArgumentError("days must be at least 2 (day 1 is warm-up)");
  if (c.fleet_multiplier < 1) throw ArgumentError("fleet multiplier must be >= 1");
  if (!(c.sigma_gw >= 0.0)) throw ArgumentError("sigma must be non-negative");
  if (!(c.beta >= 0.0)) throw ArgumentError("beta must be non-negative");
  if (!(c.relax.tol > 0.0) || c.relax.max_outer < 1 || c.relax.max_inner < 1 || c.relax.max_stalled < 1)
    throw ArgumentError("relaxation settings must be positive");
  for (int m : c.multipliers)
    if (m < 1) throw ArgumentError("bench multipliers must be >= 1");
}

inline nlohmann::json to_json(const RunConfig& c) {
  auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
  return {{"model", std::string(to_string(c.model))},
          {"fleet", {{"file", opt(c.fleet_file)}, {"multiplier", c.fleet_multiplier}}},
          {"demand", {{"file", opt(c.demand_file)}, {"days", c.days}, {"dt", c.dt}, {"sigma_gw_reference", c.sigma_gw}}},
          {"beta", c.beta},
          {"relax", {{"tol", c.relax.tol}, {"max_outer", c.relax.max_outer}, {"max_inner", c.relax.max_inner}, {"max_stalled", c.relax.max_stalled}}},
          {"sweep", {{"parallel", c.sweep.parallel},
                     {"max_width", c.sweep.max_width == kUnlimitedWidth ? nlohmann::json(nullptr) : nlohmann::json(c.sweep.max_width)}}},
          {"start_type_minutes", {{"warm_after", c.thresholds.warm_after}, {"cold_after", c.thresholds.cold_after}}},
          {"bench_multipliers", c.multipliers},
          {"oracle", {{"units", c.oracle_units}, {"instances", c.oracle_instances}}},
          {"out", c.out},
          {"seed", c.seed}};
}

}  // namespace rruc
