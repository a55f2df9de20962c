#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bansim/phy.hpp"
#include "bansim/sim.hpp"

namespace bansim {

/// A parsed scenario file plus the output paths it names.
struct ScenarioFile {
  Scenario scenario;
  std::optional<std::filesystem::path> stats_path;
  std::optional<std::filesystem::path> trace_path;
};

/// Parses `[section]` headers and `key = value` lines; `#` starts a
/// comment. Every error carries the offending line number. The result has
/// already passed `validate`.
ScenarioFile parse_scenario(std::string_view text, const PhyRegistry& registry);

ScenarioFile load_scenario(const std::filesystem::path& path, const PhyRegistry& registry);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace bansim
