#include "nanosqueeze/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "nanosqueeze/steadystate.hpp"

namespace nanosqueeze::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_keys(const Json& block, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!block.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const Json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  return v.get<double>();
}

std::pair<double, std::string> split_value(const std::string& text) {
  std::istringstream in(text);
  double value = 0.0;
  std::string unit;
  if (!(in >> value)) throw ConfigError("cannot read a number from '" + text + "'");
  std::getline(in >> std::ws, unit);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) unit.pop_back();
  return {value, unit};
}

PhysicalParams parse_physical(const Json& block) {
  static const std::vector<std::string> required = {
      "omega_c", "nu", "mass", "beta", "d", "C_c0", "x_c0",
      "V0", "VP", "E_drive", "Q_cavity", "Q_mech"};
  check_keys(block, "physical",
             {"omega_c", "nu", "mass", "beta", "d", "L", "C_sigma", "C_c0", "x_c0", "V0",
              "VP", "E_drive", "Q_cavity", "Q_mech", "T_m"});
  std::vector<std::string> missing;
  for (const auto& key : required) {
    if (!block.contains(key)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("physical block is missing: " + list);
  }
  PhysicalParams p;
  p.omega_c = parse_angular_frequency(block["omega_c"]);
  p.nu = parse_angular_frequency(block["nu"]);
  p.mass = number(block["mass"], "mass");
  p.beta = number(block["beta"], "beta");
  p.d = number(block["d"], "d");
  if (block.contains("L")) p.L = number(block["L"], "L");
  if (block.contains("C_sigma")) p.C_sigma = number(block["C_sigma"], "C_sigma");
  p.C_c0 = number(block["C_c0"], "C_c0");
  p.x_c0 = number(block["x_c0"], "x_c0");
  p.V0 = number(block["V0"], "V0");
  p.VP = number(block["VP"], "VP");
  p.E_drive = parse_rate(block["E_drive"]);
  p.Q_cavity = number(block["Q_cavity"], "Q_cavity");
  p.Q_mech = number(block["Q_mech"], "Q_mech");
  if (block.contains("T_m")) p.T_m = number(block["T_m"], "T_m");
  p.validate();
  return p;
}

void apply_effective(const Json& block, EffectiveParams& e) {
  check_keys(block, "effective",
             {"g", "chi", "gamma", "mu_ext", "mu_int", "n_m0", "g_over_mu", "chi_over_mu",
              "gamma_over_mu", "mu_int_over_mu"});
  if (block.contains("mu_ext")) e.mu_ext = parse_rate(block["mu_ext"]);
  if (block.contains("mu_int")) e.mu_int = parse_rate(block["mu_int"]);
  if (block.contains("g")) e.g = parse_rate(block["g"]);
  if (block.contains("chi")) e.chi = parse_complex(block["chi"]);
  if (block.contains("gamma")) e.gamma = parse_rate(block["gamma"]);
  if (block.contains("n_m0")) e.n_m0 = number(block["n_m0"], "n_m0");
  if (block.contains("mu_int_over_mu")) {
    // mu_int = r (mu_ext + mu_int)
    const double r = number(block["mu_int_over_mu"], "mu_int_over_mu");
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("mu_int_over_mu must lie in [0, 1)");
    e.mu_int = r * e.mu_ext / (1.0 - r);
  }
  const double mu = e.mu();
  if (block.contains("g_over_mu")) e.g = mu * number(block["g_over_mu"], "g_over_mu");
  if (block.contains("chi_over_mu")) e.chi = mu * parse_complex(block["chi_over_mu"]);
  if (block.contains("gamma_over_mu")) {
    e.gamma = mu * number(block["gamma_over_mu"], "gamma_over_mu");
  }
}

SweepAxis parse_axis(const Json& block) {
  check_keys(block, "sweep axis", {"param", "start", "stop", "steps"});
  SweepAxis a;
  if (!block.contains("param") || !block["param"].is_string()) {
    throw ConfigError("sweep axis needs a 'param' string");
  }
  a.param = block["param"].get<std::string>();
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), a.param) == names.end()) {
    throw ConfigError("cannot sweep '" + a.param + "'");
  }
  a.start = number(block.value("start", Json(0.0)), "sweep start");
  a.stop = number(block.value("stop", Json(a.start)), "sweep stop");
  a.steps = block.value("steps", 1);
  if (a.steps < 1) throw ConfigError("sweep steps must be >= 1");
  return a;
}

}  // namespace

double parse_angular_frequency(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ConfigError("frequency must be a number or a string");
  const auto [v, unit] = split_value(value.get<std::string>());
  if (unit.empty() || unit == "rad/s") return v;
  if (unit == "Hz") return kTwoPi * v;
  if (unit == "kHz") return kTwoPi * v * 1e3;
  if (unit == "MHz") return kTwoPi * v * 1e6;
  if (unit == "GHz") return kTwoPi * v * 1e9;
  throw ConfigError("unknown frequency unit '" + unit + "'");
}

double parse_rate(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ConfigError("rate must be a number or a string");
  const auto [v, unit] = split_value(value.get<std::string>());
  if (unit.empty() || unit == "1/s" || unit == "s^-1") return v;
  throw ConfigError("unknown rate unit '" + unit + "'");
}

std::complex<double> parse_complex(const Json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw ConfigError("complex value must be a number or [re, im]");
}

double SweepAxis::value(int k) const {
  if (steps == 1) return start;
  return start + (stop - start) * static_cast<double>(k) / (steps - 1);
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {
      "g", "chi", "gamma", "mu_ext", "mu_int", "n_m0", "theta",
      "g_over_mu", "chi_over_mu", "gamma_over_mu"};
  return names;
}

double RunConfig::theta_or_optimal() const {
  return theta ? *theta : optimal_phases(mode, std::arg(effective.chi)).theta;
}

double RunConfig::phi_or_optimal() const {
  return phi ? *phi : optimal_phases(mode, std::arg(effective.chi)).phi;
}

SpectrumGrid RunConfig::spectrum_grid() const {
  if (grid.half_span) return SpectrumGrid::symmetric(*grid.half_span, grid.points);
  if (grid.half_span_over_mu) {
    return SpectrumGrid::symmetric(*grid.half_span_over_mu * effective.mu(), grid.points);
  }
  const double scale = std::max({effective.mu(), effective.gamma + 4.0 * std::abs(effective.chi),
                                 2.0 * effective.g});
  return SpectrumGrid::symmetric(kDefaultGridSpanFactor * scale, grid.points);
}

TrajectoryConfig RunConfig::trajectory_config(const DriftModel& model) const {
  TrajectoryConfig cfg = default_trajectory_config(model);
  const auto& t = trajectory;
  if (t.n_streams) cfg.n_streams = *t.n_streams;
  if (t.n_segments) cfg.n_segments = *t.n_segments;
  if (t.dt) cfg.dt = *t.dt;
  if (t.burn_in) cfg.burn_in = *t.burn_in;
  if (t.duration) {
    cfg.duration = *t.duration;
  } else if (t.dt || t.n_segments || t.n_streams) {
    // Keep the default segment length in time when the step or split changes.
    const TrajectoryConfig base = default_trajectory_config(model);
    const double seg_time = base.segment_points() * base.dt;
    cfg.duration = cfg.n_streams * (cfg.segments_per_stream() + 1) * 0.5 * seg_time;
  }
  cfg.seed = t.seed;
  return cfg;
}

RunConfig config_from_json(const Json& input) {
  const Json& doc = input.contains("config") && input.contains("command") ? input["config"] : input;
  check_keys(doc, "config",
             {"physical", "effective", "mode", "psi", "theta", "phi", "grid", "sweep", "output",
              "format", "amplifier", "fock", "trajectory", "oracle", "reference"});
  RunConfig cfg;
  cfg.source = doc;

  if (doc.contains("physical")) {
    cfg.physical = parse_physical(doc["physical"]);
    cfg.effective = derive_effective(*cfg.physical, &cfg.warnings);
  }
  if (doc.contains("effective")) {
    apply_effective(doc["effective"], cfg.effective);
  } else if (!cfg.physical) {
    throw ConfigError("config needs a 'physical' or an 'effective' block");
  }

  const std::string mode = doc.value("mode", std::string("red"));
  const double psi = doc.contains("psi") ? number(doc["psi"], "psi") : std::numbers::pi / 4.0;
  try {
    cfg.mode = DriveMode::parse(mode, psi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (doc.contains("theta")) cfg.theta = number(doc["theta"], "theta");
  if (doc.contains("phi")) cfg.phi = number(doc["phi"], "phi");

  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    check_keys(g, "grid", {"half_span", "half_span_over_mu", "points"});
    if (g.contains("half_span")) cfg.grid.half_span = parse_rate(g["half_span"]);
    if (g.contains("half_span_over_mu")) {
      cfg.grid.half_span_over_mu = number(g["half_span_over_mu"], "half_span_over_mu");
    }
    cfg.grid.points = g.value("points", kDefaultGridPoints);
  }

  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    if (s.is_object()) {
      cfg.sweep.push_back(parse_axis(s));
    } else if (s.is_array()) {
      for (const auto& axis : s) cfg.sweep.push_back(parse_axis(axis));
    } else {
      throw ConfigError("sweep must be an object or an array of axes");
    }
    if (cfg.sweep.size() > 2) throw ConfigError("at most two sweep axes are supported");
  }

  cfg.output = doc.value("output", std::string());
  cfg.format = doc.value("format", std::string("csv"));
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("format must be 'csv' or 'json'");
  }

  if (doc.contains("amplifier")) {
    const Json& a = doc["amplifier"];
    check_keys(a, "amplifier", {"gain", "added_noise"});
    cfg.amplifier = Amplifier{a.value("gain", 1.0), a.value("added_noise", 0.0)};
  }
  if (doc.contains("fock")) {
    const Json& f = doc["fock"];
    check_keys(f, "fock", {"n_cav", "n_mech", "solver_tol", "max_time", "auto_escalate"});
    cfg.fock.n_cav = f.value("n_cav", cfg.fock.n_cav);
    cfg.fock.n_mech = f.value("n_mech", cfg.fock.n_mech);
    cfg.fock.solver_tol = f.value("solver_tol", cfg.fock.solver_tol);
    cfg.fock.max_time = f.value("max_time", cfg.fock.max_time);
    cfg.fock.auto_escalate = f.value("auto_escalate", cfg.fock.auto_escalate);
    cfg.fock.validate();
  }
  if (doc.contains("trajectory")) {
    const Json& t = doc["trajectory"];
    check_keys(t, "trajectory",
               {"dt", "duration", "burn_in", "n_segments", "n_streams", "seed", "series"});
    auto& o = cfg.trajectory;
    if (t.contains("dt")) o.dt = number(t["dt"], "dt");
    if (t.contains("duration")) o.duration = number(t["duration"], "duration");
    if (t.contains("burn_in")) o.burn_in = number(t["burn_in"], "burn_in");
    if (t.contains("n_segments")) o.n_segments = t["n_segments"].get<int>();
    if (t.contains("n_streams")) o.n_streams = t["n_streams"].get<int>();
    if (t.contains("seed")) o.seed = t["seed"].get<std::uint64_t>();
    o.series_path = t.value("series", std::string());
  }
  if (doc.contains("oracle")) {
    const Json& o = doc["oracle"];
    check_keys(o, "oracle", {"trajectory"});
    cfg.oracle_trajectory = o.value("trajectory", false);
  }
  if (doc.contains("reference")) {
    const Json& r = doc["reference"];
    if (!r.is_object()) throw ConfigError("reference must be an object");
    for (const auto& [key, value] : r.items()) cfg.reference[key] = number(value, key);
  }
  return cfg;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void set_path(Json& doc, const std::string& dotted, Json value) {
  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& param, double value) {
  RunConfig out = cfg;
  EffectiveParams& e = out.effective;
  if (param == "g") e.g = value;
  else if (param == "chi") e.chi = std::polar(value, std::arg(e.chi));
  else if (param == "gamma") e.gamma = value;
  else if (param == "mu_ext") e.mu_ext = value;
  else if (param == "mu_int") e.mu_int = value;
  else if (param == "n_m0") e.n_m0 = value;
  else if (param == "theta") out.theta = value;
  else if (param == "g_over_mu") e.g = value * e.mu();
  else if (param == "chi_over_mu") e.chi = std::polar(value * e.mu(), std::arg(e.chi));
  else if (param == "gamma_over_mu") e.gamma = value * e.mu();
  else throw ConfigError("cannot sweep '" + param + "'");
  return out;
}

}  // namespace nanosqueeze::cli
