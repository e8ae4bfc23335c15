#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "nanosqueeze/cli/commands.hpp"
#include "nanosqueeze/cli/config.hpp"
#include "nanosqueeze/cli/presets.hpp"

using namespace nanosqueeze::cli;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> mode, output, format, series;
  std::optional<double> psi, theta, phi;
  std::map<std::string, std::optional<double>> effective;
  std::optional<int> points;
  std::optional<double> half_span_over_mu;
  std::optional<std::uint64_t> seed;
  bool trajectory = false;
};

// Effective-parameter flags and the sibling key they replace.
const std::map<std::string, std::string> kEffectiveFlags = {
    {"g", "g_over_mu"},         {"chi", "chi_over_mu"},       {"gamma", "gamma_over_mu"},
    {"mu_ext", ""},             {"mu_int", "mu_int_over_mu"}, {"n_m0", ""},
    {"g_over_mu", "g"},         {"chi_over_mu", "chi"},       {"gamma_over_mu", "gamma"}};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON configuration or a .meta.json sidecar");
  sub->add_option("--mode", o.mode, "red, blue or blue_red");
  sub->add_option("--psi", o.psi, "relative drive phase for blue_red (rad)");
  sub->add_option("--theta", o.theta, "local-oscillator angle (rad)");
  sub->add_option("--phi", o.phi, "mechanical quadrature angle (rad)");
  for (const auto& [key, sibling] : kEffectiveFlags) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    sub->add_option(flag, o.effective[key], "effective." + key);
  }
  sub->add_option("--points", o.points, "spectrum grid points (odd)");
  sub->add_option("--span-over-mu", o.half_span_over_mu, "spectrum half-span in units of mu");
  sub->add_option("--seed", o.seed, "trajectory seed");
  sub->add_option("--series", o.series, "trajectory time-series CSV path");
  sub->add_flag("--trajectory", o.trajectory, "oracle: include the trajectory column");
  sub->add_option("-o,--out", o.output, "output file (default: standard output)");
  sub->add_option("--format", o.format, "csv or json");
}

Json merged_document(const Overrides& o) {
  Json doc = o.config.empty() ? Json::object() : read_json_file(o.config);
  if (doc.contains("config") && doc.contains("command")) doc = doc["config"];
  if (o.mode) doc["mode"] = *o.mode;
  if (o.psi) doc["psi"] = *o.psi;
  if (o.theta) doc["theta"] = *o.theta;
  if (o.phi) doc["phi"] = *o.phi;
  for (const auto& [key, value] : o.effective) {
    if (!value) continue;
    set_path(doc, "effective." + key, *value);
    const std::string& sibling = kEffectiveFlags.at(key);
    if (!sibling.empty()) doc["effective"].erase(sibling);
  }
  if (o.points) set_path(doc, "grid.points", *o.points);
  if (o.half_span_over_mu) {
    set_path(doc, "grid.half_span_over_mu", *o.half_span_over_mu);
    if (doc["grid"].contains("half_span")) doc["grid"].erase("half_span");
  }
  if (o.seed) set_path(doc, "trajectory.seed", *o.seed);
  if (o.series) set_path(doc, "trajectory.series", *o.series);
  if (o.trajectory) set_path(doc, "oracle.trajectory", true);
  if (o.output) doc["output"] = *o.output;
  if (o.format) doc["format"] = *o.format;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezing of a parametrically driven nanoresonator read out by a microwave cavity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NANOSQUEEZE_VERSION_STRING);

  std::map<std::string, Overrides> overrides;
  const std::map<std::string, std::string> help = {
      {"derive", "effective parameters and feasibility from lab quantities"},
      {"stability", "stability conditions, or a stability map over the sweep axes"},
      {"steady", "stationary moments and quadrature squeezing"},
      {"spectrum", "output squeezing spectra, optionally swept over one parameter"},
      {"sweep", "all steady-state outputs over one or two sweep axes"},
      {"simulate", "stochastic trajectory spectrum against the analytic one"},
      {"oracle", "Gaussian, Fock-basis and trajectory moments side by side"}};
  for (const auto& name : command_names()) {
    add_options(app.add_subcommand(name, help.at(name)), overrides[name]);
  }

  std::string figure;
  std::string out_dir = ".";
  auto* repro = app.add_subcommand("reproduce-figure", "write the data for a figure preset");
  repro->add_option("figure", figure, "fig2a..fig2f, fig3 or fig4")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  repro->add_option("--out-dir", out_dir, "directory for the CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (repro->parsed()) return reproduce_figure(figure, out_dir, std::cerr);
  for (const auto& name : command_names()) {
    if (!app.got_subcommand(name)) continue;
    RunConfig cfg;
    try {
      cfg = config_from_json(merged_document(overrides[name]));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitUsage;
    }
    return run_command(name, cfg, std::cout, std::cerr);
  }
  return kExitUsage;
}
