#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plq/serialize.hpp"

namespace plq {

/// Leaf preset names in listing order.
std::vector<std::string> preset_names();

/// Expands a preset or group name ("fig8" -> fig8a, fig8b, fig8c). Throws
/// ConfigError listing the available names when nothing matches.
std::vector<std::string> resolve_preset(const std::string& name);

/// Built-in configuration of a leaf preset.
Json preset_config(const std::string& name);

/// Parses a configuration document; parse errors become ConfigError with
/// "line L, column C" in the message.
Json parse_config(const std::string& text, const std::string& source);

/// Applies "dotted.path=value" to cfg. The value is parsed as JSON when possible
/// and kept as a string otherwise; array elements are addressed as "spins.1.g".
void apply_override(Json& cfg, const std::string& assignment);

/// k-grid size: explicit config value, else PLQ_NK, else `fallback`.
int resolve_nk(const ConfigNode& cfg, int fallback);

struct RunOutput {
    std::string name;
    Json config;                     ///< resolved configuration
    std::vector<std::string> files;  ///< relative to the run directory
    Json summary;
};

/// Runs one scenario and writes its artifacts into `dir` (created if needed).
/// Throws ConfigError for invalid configurations and NumericalError when a
/// computation cannot proceed.
RunOutput run_scenario(const Json& cfg, const std::filesystem::path& dir);

} // namespace plq
