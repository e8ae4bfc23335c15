#include "nanosqueeze/cli/presets.hpp"

namespace nanosqueeze::cli {

namespace {

// Caption values: mu = 3.77e5 1/s and gamma = 1.26e3 1/s for the zero-temperature
// panels, gamma / mu = 0.003334 for the thermal panels.
constexpr double kMu = 3.77e5;
constexpr double kGamma = 1.26e3;
constexpr double kGammaOverMu = 0.003334;
constexpr int kSweepSteps = 101;
constexpr int kOmegaPoints = 401;

Json spectrum_sweep(const std::string& mode, Json effective, const std::string& param,
                    double start, double stop, double half_span_over_mu) {
  Json doc;
  doc["mode"] = mode;
  doc["effective"] = std::move(effective);
  doc["grid"] = {{"half_span_over_mu", half_span_over_mu}, {"points", kOmegaPoints}};
  doc["sweep"] = {{"param", param}, {"start", start}, {"stop", stop}, {"steps", kSweepSteps}};
  return doc;
}

Json zero_temperature(Json extra) {
  Json e = {{"mu_ext", kMu}, {"gamma", kGamma}, {"n_m0", 0.0}};
  e.update(extra);
  return e;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2a", "fig2b", "fig2c", "fig2d",
                                                 "fig2e", "fig2f", "fig3",  "fig4"};
  return names;
}

Preset preset(const std::string& name) {
  Preset p;
  p.name = name;
  // Sweep ranges end just inside the stability boundary of each panel.
  if (name == "fig2a") {
    p.description = "blue sideband, chi/mu sweep at g/mu = 0.028";
    p.runs.push_back({name, spectrum_sweep("blue", zero_temperature({{"g_over_mu", 0.028}}),
                                           "chi_over_mu", 0.0, 5.1e-5, 0.5)});
  } else if (name == "fig2b") {
    p.description = "blue sideband, g/mu sweep at chi/mu = 4.8e-5";
    p.runs.push_back({name, spectrum_sweep("blue", zero_temperature({{"chi_over_mu", 4.8e-5}}),
                                           "g_over_mu", 0.0, 0.028, 0.5)});
  } else if (name == "fig2c") {
    p.description = "red sideband, chi/mu sweep at g/mu = 0.09";
    p.runs.push_back({name, spectrum_sweep("red", zero_temperature({{"g_over_mu", 0.09}}),
                                           "chi_over_mu", 0.0, 0.0089, 0.5)});
  } else if (name == "fig2d") {
    p.description = "red sideband, g/mu sweep at chi/mu = 0.003";
    p.runs.push_back({name, spectrum_sweep("red", zero_temperature({{"chi_over_mu", 0.003}}),
                                           "g_over_mu", 0.047, 0.2, 0.5)});
  } else if (name == "fig2e") {
    p.description = "both sidebands, chi/mu sweep at g/mu = 0.09";
    p.runs.push_back({name, spectrum_sweep("blue_red", zero_temperature({{"g_over_mu", 0.09}}),
                                           "chi_over_mu", 0.0, 8.3e-4, 0.5)});
  } else if (name == "fig2f") {
    p.description = "both sidebands, g/mu sweep at chi/mu = 8.0e-4";
    p.runs.push_back({name, spectrum_sweep("blue_red", zero_temperature({{"chi_over_mu", 8.0e-4}}),
                                           "g_over_mu", 0.0, 0.2, 0.5)});
  } else if (name == "fig3") {
    p.description = "red sideband, g/mu sweep at chi/mu = 0.1 (normal-mode splitting)";
    p.runs.push_back({name, spectrum_sweep("red", zero_temperature({{"chi_over_mu", 0.1}}),
                                           "g_over_mu", 0.32, 1.5, 2.5)});
  } else if (name == "fig4") {
    p.description = "red sideband, chi/mu sweep at g/mu = 0.09 for six bath occupations";
    const std::vector<std::pair<std::string, double>> panels = {
        {"a", 0.0}, {"b", 0.25}, {"c", 0.5}, {"d", 1.0}, {"e", 2.0}, {"f", 4.0}};
    for (const auto& [tag, n] : panels) {
      const Json e = {{"mu_ext", kMu}, {"gamma_over_mu", kGammaOverMu},
                      {"g_over_mu", 0.09}, {"n_m0", n}};
      p.runs.push_back({name + tag, spectrum_sweep("red", e, "chi_over_mu", 0.0, 0.0089, 0.5)});
    }
  } else {
    throw ConfigError("unknown figure preset '" + name + "'");
  }
  return p;
}

}  // namespace nanosqueeze::cli
