// Copyright 2026 The omgap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sweep configuration: a flat, sectioned key = value format.
//
//   config  := { line }
//   line    := blank | comment | section | entry
//   comment := ('#' | ';') text
//   section := '[' name ']'
//   entry   := key '=' value        (inside a section)
//
// Keys are addressed as `section.key`; a bare key is accepted on the command
// line when exactly one section defines it. Unknown sections or keys and
// repeated keys are errors.

#ifndef OMGAP_CONFIG_HPP
#define OMGAP_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "omgap/fock.hpp"

namespace omgap::config {

/// Every accepted `section.key`.
inline const std::set<std::string>& schema() {
  static const std::set<std::string> keys = {
      "model.model",       "model.J",          "model.U",           "model.mu",
      "model.kappa",       "model.gamma",      "model.r_p",         "model.r_l",
      "model.r_t",         "model.r",          "model.L",           "model.N",
      "model.density",     "model.d_max",      "grid.axis1",        "grid.axis2",
      "solver.dt",         "solver.t_relax",   "solver.t_max",      "solver.tol",
      "solver.newton",     "gaps.eps_zero",    "gaps.eps_im",       "gaps.eps_gap",
      "gaps.reference",    "relax.mode",       "relax.delta",       "relax.t_end",
      "relax.t_fit",       "relax.stride",     "relax.pattern",     "spectrum.mode",
      "spectrum.edge",     "edge.sigma",       "edge.threshold",    "edge.input",
      "gp.k_steps",        "gp.k_max",         "gp.n0",             "gp.use_total_density",
      "scaling.sizes",     "output.dir",       "output.outputs",
  };
  return keys;
}

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

/// Raw `section.key -> value` entries.
class RawConfig {
 public:
  void set(const std::string& key, const std::string& value) {
    if (!schema().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    values_[key] = value;
  }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

inline RawConfig parse(std::istream& in, const std::string& source = "<config>") {
  RawConfig cfg;
  std::set<std::string> seen;
  std::string section, line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (section.empty()) fail("entry outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!seen.insert(key).second) fail("repeated key '" + key + "'");
    try {
      cfg.set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  return cfg;
}

inline RawConfig parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

/// Resolves a command-line key (`section.key` or a unique bare key).
inline std::string resolve_key(const std::string& key) {
  if (key.find('.') != std::string::npos) {
    if (!schema().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    return key;
  }
  std::string found;
  for (const auto& k : schema()) {
    if (k.substr(k.find('.') + 1) != key) continue;
    if (!found.empty()) throw ConfigError("ambiguous key '" + key + "'; use section.key");
    found = k;
  }
  if (found.empty()) throw ConfigError("unknown configuration key '" + key + "'");
  return found;
}

/// Applies one `key=value` override.
inline void apply_override(RawConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  cfg.set(resolve_key(trim(assignment.substr(0, eq))), trim(assignment.substr(eq + 1)));
}

// ---------------------------------------------------------------------------
// Typed values

inline double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return x;
}

inline int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

/// Parameter names that grid axes and references may set.
inline bool is_axis_parameter(const std::string& name) {
  static const std::set<std::string> names = {"J", "U", "mu", "kappa", "gamma", "r_p", "r_l", "r_t", "r", "density"};
  return names.count(name) != 0;
}

inline void set_parameter(ModelParams& p, const std::string& name, double v) {
  if (name == "J") p.J = v;
  else if (name == "U") p.U = v;
  else if (name == "mu") p.mu = v;
  else if (name == "kappa") p.kappa = v;
  else if (name == "gamma") p.gamma = v;
  else if (name == "r_p") p.r_p = v;
  else if (name == "r_l") p.r_l = v;
  else if (name == "r_t") p.r_t = v;
  else if (name == "r") p.r_p = p.r_l = p.r_t = v;
  else if (name == "density") p.density = v;
  else throw ConfigError("'" + name + "' is not a sweepable parameter");
}

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  /// Evenly spaced values; a single step sits at `min`.
  std::vector<double> values() const {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) v[i] = steps == 1 ? min : min + (max - min) * double(i) / double(steps - 1);
    return v;
  }
};

/// `name min max steps`
inline Axis parse_axis(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  Axis a;
  std::string lo, hi, n, extra;
  if (!(is >> a.name >> lo >> hi >> n) || (is >> extra))
    throw ConfigError("key '" + key + "': expected 'name min max steps'");
  if (!is_axis_parameter(a.name)) throw ConfigError("key '" + key + "': '" + a.name + "' is not a sweepable parameter");
  a.min = to_double(key, lo);
  a.max = to_double(key, hi);
  a.steps = to_int(key, n);
  if (a.steps < 1) throw ConfigError("key '" + key + "': steps must be >= 1");
  return a;
}

/// `name=value, name=value`
inline std::vector<std::pair<std::string, double>> parse_assignments(const std::string& key, const std::string& v) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& item : split(v, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("key '" + key + "': expected name=value items");
    const std::string name = trim(item.substr(0, eq));
    if (!is_axis_parameter(name)) throw ConfigError("key '" + key + "': '" + name + "' is not a parameter");
    out.emplace_back(name, to_double(key, trim(item.substr(eq + 1))));
  }
  return out;
}

enum class Output { n0, n, delta_L, delta_OM, type, omega_relax };

inline Output parse_output(const std::string& s) {
  if (s == "n0") return Output::n0;
  if (s == "n") return Output::n;
  if (s == "delta_L") return Output::delta_L;
  if (s == "delta_OM") return Output::delta_OM;
  if (s == "type") return Output::type;
  if (s == "omega_relax") return Output::omega_relax;
  throw ConfigError("unknown output '" + s + "'");
}

enum class Mode { meanfield, exact };

inline Mode parse_mode(const std::string& key, const std::string& v) {
  if (v == "mf" || v == "meanfield") return Mode::meanfield;
  if (v == "exact") return Mode::exact;
  throw ConfigError("key '" + key + "': mode must be 'mf' or 'exact'");
}

// ---------------------------------------------------------------------------
// Sweep configuration

struct SweepConfig {
  Model model = Model::bond_dephasing;
  ModelParams params;
  std::vector<Axis> axes;
  std::set<Output> outputs;

  // solver
  double dt = 0.005;
  double t_relax = 200.0;
  double t_max = 2000.0;
  double tol = 1e-9;
  bool newton = true;

  // gaps; negative tolerances mean 1e-8 x spectral radius
  double eps_zero = -1.0;
  double eps_im = -1.0;
  double eps_gap = 1e-3;
  std::vector<std::pair<std::string, double>> reference;

  // relaxation
  Mode relax_mode = Mode::meanfield;
  double delta = 0.05;
  double t_end = 100.0;
  std::optional<double> t_fit;  // default 2 / kappa
  int stride = 20;
  Occupation pattern;

  // spectra and edges
  Mode spectrum_mode = Mode::meanfield;
  bool edge = false;
  double sigma = 1.0;
  double threshold = 1.5;
  std::string edge_input;

  // GP dispersion
  int k_steps = 201;
  double k_max = kPi;
  std::optional<double> gp_n0;
  bool use_total_density = false;

  std::vector<int> sizes{16, 32, 64};
  std::string out_dir = "out";

  double fit_start() const { return t_fit ? *t_fit : 2.0 / params.kappa; }
};

/// Builds a typed configuration. `model_override` stands in for a missing
/// or differing `model.model`.
inline SweepConfig build(const RawConfig& raw, std::optional<int> model_override = std::nullopt) {
  SweepConfig c;
  c.params.sites = 64;
  c.params.cutoff = 20;
  c.params.density = 0.5;
  c.params.kappa = 1.0;

  auto num = [&](const std::string& key, double& field) {
    if (auto v = raw.get(key)) field = to_double(key, *v);
  };
  auto integer = [&](const std::string& key, int& field) {
    if (auto v = raw.get(key)) field = to_int(key, *v);
  };

  std::optional<int> m = model_override;
  if (!m) {
    if (auto v = raw.get("model.model")) m = to_int("model.model", *v);
  }
  if (!m) throw ConfigError("missing required key 'model.model' (or --model)");
  c.model = model_from_int(*m);

  ModelParams& p = c.params;
  if (auto v = raw.get("model.r")) p.r_p = p.r_l = p.r_t = to_double("model.r", *v);
  num("model.J", p.J);
  num("model.U", p.U);
  num("model.mu", p.mu);
  num("model.kappa", p.kappa);
  num("model.gamma", p.gamma);
  num("model.r_p", p.r_p);
  num("model.r_l", p.r_l);
  num("model.r_t", p.r_t);
  num("model.density", p.density);
  integer("model.L", p.sites);
  integer("model.N", p.particles);
  integer("model.d_max", p.cutoff);

  for (const char* key : {"grid.axis1", "grid.axis2"})
    if (auto v = raw.get(key)) c.axes.push_back(parse_axis(key, *v));
  if (raw.has("grid.axis2") && !raw.has("grid.axis1")) throw ConfigError("grid.axis2 given without grid.axis1");

  num("solver.dt", c.dt);
  num("solver.t_relax", c.t_relax);
  num("solver.t_max", c.t_max);
  num("solver.tol", c.tol);
  if (auto v = raw.get("solver.newton")) c.newton = to_bool("solver.newton", *v);
  if (!(c.dt > 0.0)) throw ConfigError("solver.dt must be > 0");
  if (!(c.t_relax > 0.0) || !(c.t_max >= 0.0) || !(c.tol > 0.0)) throw ConfigError("invalid solver settings");

  if (auto v = raw.get("gaps.eps_zero"); v && *v != "auto") c.eps_zero = to_double("gaps.eps_zero", *v);
  if (auto v = raw.get("gaps.eps_im"); v && *v != "auto") c.eps_im = to_double("gaps.eps_im", *v);
  num("gaps.eps_gap", c.eps_gap);
  if (auto v = raw.get("gaps.reference")) c.reference = parse_assignments("gaps.reference", *v);
  if (!(c.eps_gap >= 0.0)) throw ConfigError("gaps.eps_gap must be >= 0");

  if (auto v = raw.get("relax.mode")) c.relax_mode = parse_mode("relax.mode", *v);
  num("relax.delta", c.delta);
  num("relax.t_end", c.t_end);
  if (auto v = raw.get("relax.t_fit")) c.t_fit = to_double("relax.t_fit", *v);
  integer("relax.stride", c.stride);
  if (auto v = raw.get("relax.pattern")) {
    for (const auto& tok : split(*v, ',')) c.pattern.push_back(to_int("relax.pattern", tok));
  }
  if (!(c.delta >= 0.0 && c.delta < 1.0)) throw ConfigError("relax.delta must be in [0, 1)");
  if (!(c.t_end > 0.0) || c.stride < 1) throw ConfigError("invalid relaxation settings");

  if (auto v = raw.get("spectrum.mode")) c.spectrum_mode = parse_mode("spectrum.mode", *v);
  if (auto v = raw.get("spectrum.edge")) c.edge = to_bool("spectrum.edge", *v);
  num("edge.sigma", c.sigma);
  num("edge.threshold", c.threshold);
  if (auto v = raw.get("edge.input")) c.edge_input = *v;
  if (!(c.sigma > 0.0)) throw ConfigError("edge.sigma must be > 0");

  integer("gp.k_steps", c.k_steps);
  num("gp.k_max", c.k_max);
  if (auto v = raw.get("gp.n0")) c.gp_n0 = to_double("gp.n0", *v);
  if (auto v = raw.get("gp.use_total_density")) c.use_total_density = to_bool("gp.use_total_density", *v);
  if (c.k_steps < 1) throw ConfigError("gp.k_steps must be >= 1");

  if (auto v = raw.get("scaling.sizes")) {
    c.sizes.clear();
    for (const auto& tok : split(*v, ',')) c.sizes.push_back(to_int("scaling.sizes", tok));
  }
  if (auto v = raw.get("output.dir")) c.out_dir = *v;
  if (auto v = raw.get("output.outputs")) {
    for (const auto& tok : split(*v, ',')) c.outputs.insert(parse_output(tok));
  } else {
    c.outputs = {Output::n0, Output::n, Output::delta_L, Output::delta_OM, Output::type};
  }

  p.validate(c.model);
  return c;
}

}  // namespace omgap::config

#endif  // OMGAP_CONFIG_HPP
