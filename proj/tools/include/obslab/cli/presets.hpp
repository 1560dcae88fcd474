#pragma once

#include <string_view>
#include <vector>

#include "obslab/simkit.hpp"

// Built-in scenarios, stored as TOML text compiled into the binary.
namespace obslab::cli {

std::vector<std::string_view> preset_names();

/// Throws ConfigError for an unknown name.
std::string_view preset_text(std::string_view name);

simkit::Scenario load_preset(std::string_view name);

}  // namespace obslab::cli
