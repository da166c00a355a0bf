#include "qlwave/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qlwave {

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

// Key lines seen while parsing, by dotted path, for validation messages.
using LineMap = std::map<std::string, int>;

void check_map(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed, LineMap& lines) {
  if (!n.IsMap()) throw ConfigError(line_of(n), path + ": expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(line_of(kv.first), "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    lines[path.empty() ? key : path + "." + key] = line_of(kv.first);
  }
}

template <typename T>
void read(const YAML::Node& n, const char* key, const std::string& path, T& out) {
  const YAML::Node v = n[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(line_of(v), path + "." + key + ": cannot read value '" + YAML::Dump(v) + "'");
  }
}

void read_tensor(const YAML::Node& n, const std::string& path, RadialTensor& t, LineMap& lines) {
  check_map(n, path, {"tt", "tr", "rr", "ang"}, lines);
  read(n, "tt", path, t.tt);
  read(n, "tr", path, t.tr);
  read(n, "rr", path, t.rr);
  read(n, "ang", path, t.ang);
}

Scenario read_scenario(const YAML::Node& n, LineMap& lines) {
  Scenario s;
  check_map(n, "scenario",
            {"equation", "c1", "k", "k2", "epsilon", "data", "forcing", "dr", "r_max", "cfl", "t_end", "output_every",
             "blowup_factor", "dt_min", "speed_bound"},
            lines);
  if (n["equation"]) {
    try {
      s.equation = equation_from_string(n["equation"].as<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(line_of(n["equation"]), std::string("scenario.") + e.what());
    }
  }
  const std::string p = "scenario";
  read(n, "c1", p, s.c1);
  if (n["k"]) read_tensor(n["k"], "scenario.k", s.k, lines);
  if (n["k2"]) read_tensor(n["k2"], "scenario.k2", s.k2, lines);
  read(n, "epsilon", p, s.epsilon);
  if (const auto d = n["data"]) {
    check_map(d, "scenario.data", {"kind", "width", "phi0_scale", "phi1_scale"}, lines);
    if (d["kind"]) {
      const auto kind = d["kind"].as<std::string>();
      if (kind == "bump") s.data.kind = ProfileKind::Bump;
      else if (kind == "gaussian") s.data.kind = ProfileKind::Gaussian;
      else throw ConfigError(line_of(d["kind"]), "scenario.data.kind: unknown profile '" + kind + "' (expected bump or gaussian)");
    }
    read(d, "width", "scenario.data", s.data.width);
    read(d, "phi0_scale", "scenario.data", s.data.phi0_scale);
    read(d, "phi1_scale", "scenario.data", s.data.phi1_scale);
  }
  if (const auto f = n["forcing"]) {
    check_map(f, "scenario.forcing", {"amplitude", "t_center", "t_half_width", "r_half_width"}, lines);
    read(f, "amplitude", "scenario.forcing", s.forcing.amplitude);
    read(f, "t_center", "scenario.forcing", s.forcing.t_center);
    read(f, "t_half_width", "scenario.forcing", s.forcing.t_half_width);
    read(f, "r_half_width", "scenario.forcing", s.forcing.r_half_width);
  }
  read(n, "dr", p, s.dr);
  read(n, "r_max", p, s.r_max);
  read(n, "cfl", p, s.cfl);
  read(n, "t_end", p, s.t_end);
  read(n, "output_every", p, s.output_every);
  read(n, "blowup_factor", p, s.blowup_factor);
  read(n, "dt_min", p, s.dt_min);
  read(n, "speed_bound", p, s.speed_bound);
  try {
    validate(s);
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    std::string field = msg.substr(0, msg.find(' '));
    if (field == "forcing") field = "forcing.t_half_width";
    auto it = lines.find("scenario." + field);
    throw ConfigError(it != lines.end() ? it->second : line_of(n), "scenario." + msg);
  }
  return s;
}

void read_eikonal(const YAML::Node& n, EikonalConfig& e, LineMap& lines) {
  check_map(n, "eikonal",
            {"enabled", "spacing", "fine_spacing", "dense_min", "dense_max", "growth", "step_fraction", "nu"}, lines);
  const std::string p = "eikonal";
  read(n, "enabled", p, e.enabled);
  read(n, "spacing", p, e.params.spacing);
  read(n, "fine_spacing", p, e.params.fine_spacing);
  read(n, "dense_min", p, e.params.dense_min);
  read(n, "dense_max", p, e.params.dense_max);
  read(n, "growth", p, e.params.growth);
  read(n, "step_fraction", p, e.params.step_fraction);
  read(n, "nu", p, e.nu);
  auto fail = [&](const char* key, const std::string& msg) {
    throw ConfigError(lines.count(std::string("eikonal.") + key) ? lines["eikonal." + std::string(key)] : line_of(n),
                      std::string("eikonal.") + key + ": " + msg);
  };
  if (e.params.spacing < 0) fail("spacing", "must be non-negative");
  if (e.params.fine_spacing < 0) fail("fine_spacing", "must be non-negative");
  if (!(e.params.dense_min < e.params.dense_max)) fail("dense_min", "must be below dense_max");
  if (!(e.params.growth > 0)) fail("growth", "must be positive");
  if (!(e.params.step_fraction > 0 && e.params.step_fraction <= 1)) fail("step_fraction", "must lie in (0, 1]");
  if (!(e.nu > 0 && e.nu < 1)) fail("nu", "must lie in (0, 1)");
}

void read_diagnostics(const YAML::Node& n, DiagnosticsConfig& d, LineMap& lines) {
  check_map(n, "diagnostics",
            {"inequalities", "fits", "kappa", "nu_prime", "ks_stride", "tangential_stride", "energy_max_order",
             "energy_stride", "fit_window"},
            lines);
  const std::string p = "diagnostics";
  if (const auto ids = n["inequalities"]) {
    if (!ids.IsSequence()) throw ConfigError(line_of(ids), "diagnostics.inequalities: expected a list");
    d.inequalities.clear();
    for (const auto& id : ids) {
      const auto s = id.as<std::string>();
      if (std::find(kInequalityIds.begin(), kInequalityIds.end(), s) == kInequalityIds.end())
        throw ConfigError(line_of(id), "diagnostics.inequalities: unknown id '" + s + "'");
      if (std::find(d.inequalities.begin(), d.inequalities.end(), s) == d.inequalities.end())
        d.inequalities.push_back(s);
    }
  }
  if (const auto fits = n["fits"]) {
    if (!fits.IsSequence()) throw ConfigError(line_of(fits), "diagnostics.fits: expected a list");
    d.fits.clear();
    for (const auto& f : fits) {
      try {
        d.fits.push_back(decay_quantity_from_string(f.as<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line_of(f), std::string("diagnostics.fits: ") + e.what());
      }
    }
  }
  read(n, "kappa", p, d.kappa);
  read(n, "nu_prime", p, d.nu_prime);
  read(n, "ks_stride", p, d.ks_stride);
  read(n, "tangential_stride", p, d.tangential_stride);
  read(n, "energy_max_order", p, d.energy_max_order);
  read(n, "energy_stride", p, d.energy_stride);
  if (const auto w = n["fit_window"]) {
    if (!w.IsSequence() || w.size() != 2) throw ConfigError(line_of(w), "diagnostics.fit_window: expected [t1, t2]");
    d.fit_t1 = w[0].as<double>();
    d.fit_t2 = w[1].as<double>();
    if (!(d.fit_t1 >= 0 && d.fit_t2 > d.fit_t1))
      throw ConfigError(line_of(w), "diagnostics.fit_window: need 0 <= t1 < t2");
  }
  auto fail = [&](const char* key, const std::string& msg) {
    throw ConfigError(lines["diagnostics." + std::string(key)], std::string("diagnostics.") + key + ": " + msg);
  };
  if (d.kappa < 0) fail("kappa", "must be non-negative");
  if (!(d.nu_prime > 0)) fail("nu_prime", "must be positive");
  if (d.ks_stride < 1) fail("ks_stride", "must be at least 1");
  if (d.tangential_stride < 1) fail("tangential_stride", "must be at least 1");
  if (d.energy_max_order < 0 || d.energy_max_order > 3) fail("energy_max_order", "must lie in [0, 3]");
  if (d.energy_stride < 1) fail("energy_stride", "must be at least 1");
}

void read_output(const YAML::Node& n, RunConfig& c, LineMap& lines) {
  check_map(n, "output", {"dir", "snapshot_stride", "r_stride", "curve_stride"}, lines);
  read(n, "dir", "output", c.out_dir);
  read(n, "snapshot_stride", "output", c.output.snapshot_stride);
  read(n, "r_stride", "output", c.output.r_stride);
  read(n, "curve_stride", "output", c.output.curve_stride);
  const std::pair<const char*, int> strides[] = {{"snapshot_stride", c.output.snapshot_stride},
                                                  {"r_stride", c.output.r_stride},
                                                  {"curve_stride", c.output.curve_stride}};
  for (const auto& [key, value] : strides)
    if (value < 1) throw ConfigError(lines["output." + std::string(key)], "output." + std::string(key) + ": must be at least 1");
}

YAML::Node load_document(const std::string& text) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root || root.IsNull()) throw ConfigError(0, "empty configuration");
    return root;
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "YAML syntax error: " + e.msg);
  }
}

RunConfig read_run(const YAML::Node& root, bool allow_sweep, LineMap& lines) {
  std::set<std::string> top{"scenario", "eikonal", "diagnostics", "output"};
  if (allow_sweep) top.insert("sweep");
  check_map(root, "", top, lines);
  if (!root["scenario"]) throw ConfigError(line_of(root), "missing 'scenario' section");
  RunConfig c;
  c.scenario = read_scenario(root["scenario"], lines);
  if (root["eikonal"]) read_eikonal(root["eikonal"], c.eikonal, lines);
  if (root["diagnostics"]) read_diagnostics(root["diagnostics"], c.diagnostics, lines);
  if (root["output"]) read_output(root["output"], c, lines);
  for (const auto& id : c.diagnostics.inequalities) {
    const int line = lines.count("diagnostics.inequalities") ? lines["diagnostics.inequalities"] : 0;
    if ((id == "energy" || id == "poincare") && !c.eikonal.enabled)
      throw ConfigError(line, "diagnostics.inequalities: '" + id + "' needs eikonal.enabled");
    if ((id == "hormander" || id == "hormander_corollary") && c.scenario.equation != EquationKind::Forced)
      throw ConfigError(line, "diagnostics.inequalities: '" + id + "' needs a forced scenario");
  }
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  LineMap lines;
  const YAML::Node root = load_document(text);
  try {
    return read_run(root, false, lines);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.mark.line + 1, e.msg);
  }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(slurp(path)); }

SweepConfig parse_sweep_config(const std::string& text) {
  LineMap lines;
  const YAML::Node root = load_document(text);
  SweepConfig sc;
  try {
    sc.base = read_run(root, true, lines);
    const YAML::Node sw = root["sweep"];
    if (!sw) throw ConfigError(line_of(root), "missing 'sweep' section");
    check_map(sw, "sweep", {"epsilons", "parallel"}, lines);
    read(sw, "parallel", "sweep", sc.parallel);
    if (sc.parallel < 1) throw ConfigError(lines["sweep.parallel"], "sweep.parallel: must be at least 1");
    const YAML::Node eps = sw["epsilons"];
    if (!eps || !eps.IsSequence()) throw ConfigError(line_of(sw), "sweep.epsilons: expected a list");
    for (const auto& e : eps) {
      double v = 0;
      try {
        v = e.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(line_of(e), "sweep.epsilons: not a number");
      }
      if (!(v > 0)) throw ConfigError(line_of(e), "sweep.epsilons: values must be positive");
      if (std::find(sc.epsilons.begin(), sc.epsilons.end(), v) != sc.epsilons.end())
        throw ConfigError(line_of(e), "sweep.epsilons: values must be distinct");
      sc.epsilons.push_back(v);
    }
    if (sc.epsilons.empty()) throw ConfigError(line_of(eps), "sweep.epsilons: list is empty");
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.mark.line + 1, e.msg);
  }
  return sc;
}

SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(slurp(path)); }

}  // namespace qlwave
