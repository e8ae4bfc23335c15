#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nanosqueeze/fock.hpp"
#include "nanosqueeze/model.hpp"
#include "nanosqueeze/params.hpp"
#include "nanosqueeze/spectra.hpp"
#include "nanosqueeze/trajectory.hpp"

namespace nanosqueeze::cli {

using Json = nlohmann::ordered_json;

/// Thrown for malformed or incomplete configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Angular frequency from a number (rad/s) or a string "<value> <unit>" with
/// unit one of rad/s, Hz, kHz, MHz, GHz. Hz-based units are multiplied by 2 pi.
double parse_angular_frequency(const Json& value);

/// Rate in 1/s from a number or a string "<value> 1/s".
double parse_rate(const Json& value);

/// chi from a number or a two-element [re, im] array.
std::complex<double> parse_complex(const Json& value);

struct SweepAxis {
  std::string param;   // an EffectiveParams field, a *_over_mu ratio, or theta
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;

  double value(int k) const;
};

/// Names accepted as sweep parameters.
const std::vector<std::string>& sweep_parameters();

struct GridSpec {
  std::optional<double> half_span;          // rad/s
  std::optional<double> half_span_over_mu;
  int points = kDefaultGridPoints;
};

struct TrajectoryOverrides {
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<double> burn_in;
  std::optional<int> n_segments;
  std::optional<int> n_streams;
  std::uint64_t seed = 1;
  std::string series_path;   // optional time-series CSV (t_s, x_out)
};

struct RunConfig {
  Json source;                                 // merged document, echoed in metadata
  std::optional<PhysicalParams> physical;
  EffectiveParams effective;                   // resolved
  std::vector<std::string> warnings;
  DriveMode mode = DriveMode::red();
  std::optional<double> theta;
  std::optional<double> phi;
  GridSpec grid;
  std::vector<SweepAxis> sweep;
  std::string output;                          // empty: standard output
  std::string format = "csv";                  // csv or json
  std::optional<Amplifier> amplifier;
  fock::FockConfig fock;
  TrajectoryOverrides trajectory;
  bool oracle_trajectory = false;
  std::map<std::string, double> reference;

  /// Local-oscillator angle: configured value or the optimum for the mode.
  double theta_or_optimal() const;
  double phi_or_optimal() const;
  SpectrumGrid spectrum_grid() const;
  TrajectoryConfig trajectory_config(const DriftModel& model) const;
};

/// Parses and resolves a configuration document. A metadata sidecar (with a
/// "config" member) is accepted in place of a plain configuration.
RunConfig config_from_json(const Json& doc);
Json read_json_file(const std::string& path);

/// Sets a dotted key ("effective.g", "mode") in the document, creating
/// intermediate objects.
void set_path(Json& doc, const std::string& dotted, Json value);

/// Copy of cfg with one sweep parameter set; *_over_mu values scale with the
/// resolved mu and chi keeps its phase.
RunConfig with_parameter(const RunConfig& cfg, const std::string& param, double value);

}  // namespace nanosqueeze::cli
