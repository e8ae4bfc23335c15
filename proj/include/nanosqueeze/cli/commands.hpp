#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "nanosqueeze/cli/config.hpp"

namespace nanosqueeze::cli {

using Cell = std::variant<double, std::string>;

/// Column-labelled result rows. Doubles are written with 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const;
  Json to_json() const;
};

/// Exit codes of the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;   // a requested computation failed
inline constexpr int kExitUsage = 2;    // bad configuration or arguments

const std::vector<std::string>& command_names();

/// Runs one subcommand. Tables go to cfg.output (plus a .meta.json sidecar)
/// or to `out` when no output path is set; diagnostics go to `log`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& log);

/// Writes every run of a figure preset as <out_dir>/<stem>.csv with sidecars.
int reproduce_figure(const std::string& name, const std::string& out_dir, std::ostream& log);

/// Sidecar path for an output file.
std::string metadata_path(const std::string& output);

}  // namespace nanosqueeze::cli
