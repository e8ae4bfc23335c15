#pragma once

#include <string>
#include <vector>

#include "nanosqueeze/cli/config.hpp"

namespace nanosqueeze::cli {

// Bumped whenever a preset's parameters change.
inline constexpr int kPresetTableVersion = 1;

struct PresetRun {
  std::string stem;   // output file name without extension
  Json config;        // a complete spectrum-sweep configuration
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetRun> runs;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for an unknown name.
Preset preset(const std::string& name);

}  // namespace nanosqueeze::cli
