#include "nanosqueeze/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nanosqueeze/cli/presets.hpp"
#include "nanosqueeze/parallel.hpp"
#include "nanosqueeze/steadystate.hpp"

#ifndef NANOSQUEEZE_VERSION
#define NANOSQUEEZE_VERSION "unknown"
#endif

namespace nanosqueeze::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << (v == 0.0 ? 0.0 : v);
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

Json effective_json(const EffectiveParams& e) {
  return {{"g", e.g},         {"chi", {e.chi.real(), e.chi.imag()}},
          {"gamma", e.gamma}, {"mu_ext", e.mu_ext},
          {"mu_int", e.mu_int}, {"n_m0", e.n_m0}};
}

void emit(const std::string& command, const RunConfig& cfg, const Table& table,
          std::ostream& out, std::ostream& log, const Json& extra = Json::object()) {
  auto write = [&](std::ostream& os) {
    if (cfg.format == "json") {
      os << table.to_json().dump(2) << '\n';
    } else {
      table.write_csv(os);
    }
  };
  if (cfg.output.empty()) {
    write(out);
    return;
  }
  const std::filesystem::path path(cfg.output);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(cfg.output);
  if (!file) throw std::runtime_error("cannot write " + cfg.output);
  write(file);

  Json meta;
  meta["command"] = command;
  meta["version"] = NANOSQUEEZE_VERSION;
  meta["config"] = cfg.source;
  meta["resolved_effective"] = effective_json(cfg.effective);
  meta["mode"] = cfg.mode.name();
  meta["warnings"] = cfg.warnings;
  for (const auto& [key, value] : extra.items()) meta[key] = value;
  std::ofstream side(metadata_path(cfg.output));
  side << meta.dump(2) << '\n';
  log << "wrote " << cfg.output << " (" << table.rows.size() << " rows)\n";
}

// Cartesian product of the sweep axes; one element with no values when unswept.
std::vector<std::vector<double>> sweep_points(const RunConfig& cfg) {
  std::vector<std::vector<double>> points = {{}};
  for (const auto& axis : cfg.sweep) {
    std::vector<std::vector<double>> next;
    for (const auto& p : points) {
      for (int k = 0; k < axis.steps; ++k) {
        auto q = p;
        q.push_back(axis.value(k));
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

RunConfig at_point(const RunConfig& cfg, const std::vector<double>& values) {
  RunConfig c = cfg;
  for (std::size_t k = 0; k < values.size(); ++k) {
    c = with_parameter(c, cfg.sweep[k].param, values[k]);
  }
  return c;
}

std::vector<std::string> sweep_columns(const RunConfig& cfg) {
  std::vector<std::string> cols;
  for (const auto& axis : cfg.sweep) cols.push_back(axis.param);
  return cols;
}

double chi_fraction(const RunConfig& c) {
  const double thr = chi_threshold(c.effective, c.mode);
  return thr > 0.0 ? std::abs(c.effective.chi) / thr : std::numeric_limits<double>::infinity();
}

int report_failures(const std::vector<std::string>& status, std::ostream& log) {
  int failed = 0;
  for (std::size_t k = 0; k < status.size(); ++k) {
    if (status[k] != "ok") {
      log << "row " << k << ": " << status[k] << '\n';
      ++failed;
    }
  }
  if (failed > 0) log << failed << " of " << status.size() << " rows failed\n";
  return failed > 0 ? kExitFailed : kExitOk;
}

int cmd_derive(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (!cfg.physical) throw ConfigError("derive needs a 'physical' block");
  const PhysicalParams& p = *cfg.physical;
  const EffectiveParams& e = cfg.effective;
  const double dx = zero_point_width(p.mass, p.nu);
  const double kappa = derive_kappa(p.beta, p.omega_c, dx, p.d);
  const double n_d = drive_photon_number(p.E_drive, p.nu);

  Table t;
  t.columns = {"quantity", "value", "unit", "reference", "relative_difference"};
  auto row = [&](const std::string& name, double value, const std::string& unit) {
    const auto ref = cfg.reference.find(name);
    if (ref == cfg.reference.end()) {
      t.rows.push_back({name, value, unit, kNaN, kNaN});
    } else {
      t.rows.push_back({name, value, unit, ref->second, value / ref->second - 1.0});
    }
  };
  row("delta_x", dx, "m");
  row("kappa", kappa, "1/s");
  row("E_drive", p.E_drive, "1/s");
  row("g", e.g, "1/s");
  row("g_over_mu", e.g / e.mu(), "1");
  row("k0", spring_modulation(p.C_c0, p.V0, p.VP, p.x_c0), "kg/s^2");
  row("V0VP", p.V0 * p.VP, "V^2");
  row("chi", std::abs(e.chi), "1/s");
  row("chi_over_mu", std::abs(e.chi) / e.mu(), "1");
  row("mu", e.mu(), "1/s");
  row("gamma", e.gamma, "1/s");
  row("Gamma", e.cooling_rate(), "1/s");
  row("n_m0", e.n_m0, "1");
  row("n_d", n_d, "1");
  row("P_circ", circulating_power(n_d, p.omega_c), "W");
  row("nu_over_mu", p.nu / e.mu(), "1");
  if (p.L && p.C_sigma) row("resonance_mismatch", resonance_mismatch(p.omega_c, *p.L, *p.C_sigma), "1");

  const FeasibilityReport report = feasibility_report(p, e, cfg.mode);
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    log << (c.pass ? "pass " : "FAIL ") << c.label << ": " << format_double(c.value)
        << " (bound " << format_double(c.bound) << ")" << (c.note.empty() ? "" : "  " + c.note)
        << '\n';
    checks.push_back({{"label", c.label}, {"value", c.value}, {"bound", c.bound},
                      {"pass", c.pass}, {"note", c.note}});
  }
  for (const auto& n : report.notes) log << "note: " << n << '\n';
  for (const auto& w : cfg.warnings) log << "warning: " << w << '\n';
  emit("derive", cfg, t, out, log, {{"feasibility", checks}, {"notes", report.notes}});
  return kExitOk;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  Table t;
  if (cfg.sweep.empty()) {
    const StabilityReport r = stability(cfg.effective, cfg.mode);
    t.columns = {"condition", "value", "bound", "pass"};
    for (const auto& m : r.analytic_margins) {
      t.rows.push_back({m.label, m.value, m.bound, m.pass() ? "true" : "false"});
    }
    t.rows.push_back({"max_real_eigenvalue", r.max_real_eigenvalue,
                      -stability_epsilon(cfg.effective), r.eigenvalue_pass ? "true" : "false"});
    if (!r.consistent()) log << "analytic and eigenvalue criteria disagree\n";
    if (!r.eigenvalue_pass) log << "unstable: " << r.violated() << '\n';
    emit("stability", cfg, t, out, log);
    return kExitOk;
  }
  const auto points = sweep_points(cfg);
  t.columns = sweep_columns(cfg);
  for (const char* c : {"analytic_stable", "eigenvalue_stable", "max_real_eigenvalue", "chi_threshold"}) {
    t.columns.push_back(c);
  }
  t.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const RunConfig c = at_point(cfg, points[k]);
    const StabilityReport r = stability(c.effective, c.mode);
    auto& row = t.rows[k];
    for (double v : points[k]) row.push_back(v);
    row.push_back(r.analytic_pass ? 1.0 : 0.0);
    row.push_back(r.eigenvalue_pass ? 1.0 : 0.0);
    row.push_back(r.max_real_eigenvalue);
    row.push_back(chi_threshold(c.effective, c.mode));
  });
  emit("stability", cfg, t, out, log);
  return kExitOk;
}

struct SteadyRow {
  std::vector<Cell> cells;
  std::string status = "ok";
};

std::vector<std::string> steady_columns() {
  return {"S_Xm", "S_Ym", "phi", "S_Xc", "S_Yc", "theta", "n_b", "b2_re", "b2_im", "n_a",
          "a2_re", "a2_im", "condition_number", "near_threshold", "chi_over_threshold"};
}

std::vector<Cell> steady_cells(const RunConfig& c) {
  const DriftModel model = build_drift(c.effective, c.mode);
  const SteadySolution s = solve_steady_moments(model);
  const double phi = c.phi_or_optimal();
  const double theta = c.theta_or_optimal();
  const QuadratureSqueezing m = quadrature_squeezing(s.moments.mechanics(), phi);
  const QuadratureSqueezing a = quadrature_squeezing(s.moments.cavity(), theta);
  return {m.S_X, m.S_Y, phi, a.S_X, a.S_Y, theta, s.moments.bdb.real(), s.moments.b2.real(),
          s.moments.b2.imag(), s.moments.ada.real(), s.moments.a2.real(), s.moments.a2.imag(),
          s.condition_number, s.near_threshold ? 1.0 : 0.0, chi_fraction(c)};
}

int cmd_steady(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto points = sweep_points(cfg);
  Table t;
  t.columns = sweep_columns(cfg);
  const auto cols = steady_columns();
  t.columns.insert(t.columns.end(), cols.begin(), cols.end());
  t.columns.push_back("status");
  std::vector<std::string> status(points.size(), "ok");
  t.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    auto& row = t.rows[k];
    for (double v : points[k]) row.push_back(v);
    try {
      const RunConfig c = at_point(cfg, points[k]);
      c.effective.validate();
      const auto cells = steady_cells(c);
      row.insert(row.end(), cells.begin(), cells.end());
    } catch (const std::exception& e) {
      status[k] = e.what();
      row.resize(points[k].size() + cols.size(), kNaN);
    }
    row.push_back(status[k]);
  });
  emit("steady", cfg, t, out, log);
  return report_failures(status, log);
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& log,
                 const Json& extra = Json::object()) {
  if (cfg.sweep.size() > 1) throw ConfigError("spectrum supports one sweep axis");
  const auto points = sweep_points(cfg);
  Table t;
  t.columns = sweep_columns(cfg);
  for (const char* c : {"omega", "omega_over_mu", "S_squeezed", "S_antisqueezed", "S_Ym", "S_Xm", "status"}) {
    t.columns.push_back(c);
  }
  std::vector<std::string> status(points.size(), "ok");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const RunConfig c = at_point(cfg, points[k]);
    std::vector<std::vector<Cell>> rows;
    try {
      c.effective.validate();
      const DriftModel model = build_drift(c.effective, c.mode);
      const SpectrumGrid grid = c.spectrum_grid();
      SpectrumResult s = output_spectrum(model, c.theta_or_optimal(), grid);
      if (c.amplifier) s = amplifier_noise(s, c.amplifier->gain, c.amplifier->added_noise);
      const SteadySolution st = solve_steady_moments(model);
      const QuadratureSqueezing m = quadrature_squeezing(st.moments.mechanics(), c.phi_or_optimal());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<Cell> row(points[k].begin(), points[k].end());
        for (Cell v : {Cell(grid.omega[j]), Cell(grid.omega[j] / c.effective.mu()),
                       Cell(s.S_squeezed[j]), Cell(s.S_antisqueezed[j]), Cell(m.S_Y), Cell(m.S_X),
                       Cell(std::string("ok"))}) {
          row.push_back(v);
        }
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      status[k] = e.what();
      std::vector<Cell> row(points[k].begin(), points[k].end());
      for (int j = 0; j < 6; ++j) row.push_back(kNaN);
      row.push_back(status[k]);
      rows = {row};
    }
    for (auto& r : rows) t.rows.push_back(std::move(r));
  }
  emit("spectrum", cfg, t, out, log, extra);
  return report_failures(status, log);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.sweep.empty()) throw ConfigError("sweep needs a 'sweep' block");
  const auto points = sweep_points(cfg);
  Table t;
  t.columns = sweep_columns(cfg);
  for (const char* c : {"analytic_stable", "eigenvalue_stable", "max_real_eigenvalue", "chi_threshold"}) {
    t.columns.push_back(c);
  }
  const auto cols = steady_columns();
  t.columns.insert(t.columns.end(), cols.begin(), cols.end());
  for (const char* c : {"S_squeezed_0", "S_antisqueezed_0", "n_final_adiabatic", "status"}) {
    t.columns.push_back(c);
  }
  const std::size_t numeric = t.columns.size() - 1;
  std::vector<std::string> status(points.size(), "ok");
  t.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    auto& row = t.rows[k];
    for (double v : points[k]) row.push_back(v);
    try {
      const RunConfig c = at_point(cfg, points[k]);
      c.effective.validate();
      const StabilityReport r = stability(c.effective, c.mode);
      row.push_back(r.analytic_pass ? 1.0 : 0.0);
      row.push_back(r.eigenvalue_pass ? 1.0 : 0.0);
      row.push_back(r.max_real_eigenvalue);
      row.push_back(chi_threshold(c.effective, c.mode));
      const auto cells = steady_cells(c);
      row.insert(row.end(), cells.begin(), cells.end());
      const DriftModel model = build_drift(c.effective, c.mode);
      const OutputMoments o = output_moments(model, 0.0);
      const double th = c.theta_or_optimal();
      const std::complex<double> rot = std::polar(1.0, -2.0 * th);
      const double phase = (rot * o.aa + std::conj(rot) * o.adad).real();
      row.push_back(phase + 2.0 * o.ada.real());
      row.push_back(-phase + 2.0 * o.ada.real());
      double n_final = kNaN;
      try {
        n_final = final_phonon_number(c.effective, c.mode);
      } catch (const NoSteadyState&) {
      }
      row.push_back(n_final);
    } catch (const std::exception& e) {
      status[k] = e.what();
    }
    row.resize(numeric, kNaN);
    row.push_back(status[k]);
  });
  emit("sweep", cfg, t, out, log);
  return report_failures(status, log);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.effective.validate();
  const DriftModel model = build_drift(cfg.effective, cfg.mode);
  const TrajectoryConfig tc = cfg.trajectory_config(model);
  const double theta = cfg.theta_or_optimal();
  const OutputSeries series = simulate_output(model, theta, tc);
  const SpectrumResult est = estimate_spectrum(series, tc);
  const double scale = std::max({cfg.effective.mu(), cfg.effective.gamma + 4.0 * std::abs(cfg.effective.chi),
                                 2.0 * cfg.effective.g});
  const double omega_max = kDefaultGridSpanFactor * scale;
  const SpectrumComparison cmp = compare_to_analytic(est, model, omega_max);

  Table t;
  t.columns = {"omega", "omega_over_mu", "S_squeezed", "S_squeezed_stderr", "S_antisqueezed",
               "S_squeezed_analytic"};
  for (std::size_t b = 0; b < est.grid.size() && est.grid.omega[b] <= omega_max; ++b) {
    t.rows.push_back({est.grid.omega[b], est.grid.omega[b] / cfg.effective.mu(), est.S_squeezed[b],
                      est.S_squeezed_stderr[b], est.S_antisqueezed[b], cmp.analytic[b]});
  }
  log << "bins within 3 sigma of analytic: " << cmp.fraction_within_3sigma << " of " << cmp.bins
      << '\n';
  if (!cfg.trajectory.series_path.empty()) {
    std::ofstream s(cfg.trajectory.series_path);
    if (!s) throw std::runtime_error("cannot write " + cfg.trajectory.series_path);
    s << "t_s,x_out\n" << std::setprecision(17);
    const auto& xs = series.x_out.front();
    for (std::size_t k = 0; k < xs.size(); ++k) s << k * series.dt << ',' << xs[k] << '\n';
  }
  const Json extra = {{"trajectory",
                       {{"dt", tc.dt}, {"duration", tc.duration}, {"burn_in", tc.burn_in},
                        {"n_segments", tc.n_segments}, {"n_streams", tc.n_streams},
                        {"seed", tc.seed}, {"segment_points", tc.segment_points()}}},
                      {"fraction_within_3sigma", cmp.fraction_within_3sigma}};
  emit("simulate", cfg, t, out, log, extra);
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.effective.validate();
  const DriftModel model = build_drift(cfg.effective, cfg.mode);
  const MomentState gauss = solve_steady_moments(model).moments;
  const fock::FullResult full = fock::full_me_steady(cfg.effective, cfg.mode, cfg.fock);

  const double eps = fock::adiabatic_epsilon(cfg.effective);
  std::optional<fock::MechanicalResult> reduced;
  if (eps <= 0.1) {
    reduced = fock::reduced_me_steady(cfg.effective, cfg.mode, cfg.fock);
  } else {
    log << "reduced master equation skipped: epsilon = " << eps << " > 0.1\n";
  }
  std::optional<CovarianceEstimate> traj;
  if (cfg.oracle_trajectory) traj = simulate_covariance(model, cfg.trajectory_config(model));

  Table t;
  t.columns = {"quantity", "gaussian", "fock_full", "fock_reduced", "trajectory", "trajectory_stderr"};
  auto traj_mode = [&](int i, int which, double& value, double& err) {
    if (!traj) return;
    const auto& v = traj->mean;
    const auto& s = traj->stderr_;
    switch (which) {
      case 0:
        value = (v(i, i) + v(i + 1, i + 1)) / 4.0 - 0.5;
        err = std::hypot(s(i, i), s(i + 1, i + 1)) / 4.0;
        break;
      case 1:
        value = (v(i, i) - v(i + 1, i + 1)) / 4.0;
        err = std::hypot(s(i, i), s(i + 1, i + 1)) / 4.0;
        break;
      default:
        value = v(i, i + 1) / 2.0;
        err = s(i, i + 1) / 2.0;
    }
  };
  auto add = [&](const std::string& name, double g, double f, double r, int index, int which) {
    double tv = kNaN;
    double te = kNaN;
    traj_mode(index, which, tv, te);
    t.rows.push_back({name, g, f, r, tv, te});
  };
  const MomentState& fm = full.moments;
  add("n_b", gauss.bdb.real(), fm.bdb.real(), reduced ? reduced->moments.number : kNaN, 2, 0);
  add("b2_re", gauss.b2.real(), fm.b2.real(), reduced ? reduced->moments.second.real() : kNaN, 2, 1);
  add("b2_im", gauss.b2.imag(), fm.b2.imag(), reduced ? reduced->moments.second.imag() : kNaN, 2, 2);
  add("n_a", gauss.ada.real(), fm.ada.real(), kNaN, 0, 0);
  add("a2_re", gauss.a2.real(), fm.a2.real(), kNaN, 0, 1);
  add("a2_im", gauss.a2.imag(), fm.a2.imag(), kNaN, 0, 2);
  log << "epsilon = " << eps << ", Fock truncation n_cav = " << full.used.n_cav
      << ", n_mech = " << full.used.n_mech << ", gaussianity residual "
      << fock::gaussianity_residual(full.state) << '\n';
  emit("oracle", cfg, t, out, log, {{"epsilon", eps}});
  return kExitOk;
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << csv_field(columns[c]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (const double* d = std::get_if<double>(&row[c])) {
        out << format_double(*d);
      } else {
        out << csv_field(std::get<std::string>(row[c]));
      }
    }
    out << '\n';
  }
}

Json Table::to_json() const {
  Json rows_json = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (const auto& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        r.push_back(std::isfinite(*d) ? Json(*d) : Json(nullptr));
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows_json.push_back(std::move(r));
  }
  return {{"columns", columns}, {"rows", rows_json}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"derive", "stability", "steady", "spectrum",
                                                 "sweep",  "simulate",  "oracle"};
  return names;
}

std::string metadata_path(const std::string& output) { return output + ".meta.json"; }

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& log) {
  try {
    if (command == "derive") return cmd_derive(cfg, out, log);
    if (command == "stability") return cmd_stability(cfg, out, log);
    if (command == "steady") return cmd_steady(cfg, out, log);
    if (command == "spectrum") return cmd_spectrum(cfg, out, log);
    if (command == "sweep") return cmd_sweep(cfg, out, log);
    if (command == "simulate") return cmd_simulate(cfg, out, log);
    if (command == "oracle") return cmd_oracle(cfg, out, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  log << "unknown command '" << command << "'\n";
  return kExitUsage;
}

int reproduce_figure(const std::string& name, const std::string& out_dir, std::ostream& log) {
  Preset p;
  try {
    p = preset(name);
  } catch (const ConfigError& e) {
    log << e.what() << '\n';
    return kExitUsage;
  }
  log << name << ": " << p.description << '\n';
  int code = kExitOk;
  for (const auto& run : p.runs) {
    Json doc = run.config;
    doc["output"] = (std::filesystem::path(out_dir) / (run.stem + ".csv")).string();
    try {
      const RunConfig cfg = config_from_json(doc);
      std::ostringstream unused;
      const int rc = cmd_spectrum(cfg, unused, log,
                                  {{"preset", name}, {"preset_table", kPresetTableVersion}});
      code = std::max(code, rc);
    } catch (const std::exception& e) {
      log << run.stem << ": " << e.what() << '\n';
      code = kExitFailed;
    }
  }
  return code;
}

}  // namespace nanosqueeze::cli
