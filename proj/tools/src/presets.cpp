#include "obslab/cli/presets.hpp"

#include <string>

#include "obslab/cli/scenario_file.hpp"

namespace obslab::cli {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& preset_table();
}

std::vector<std::string_view> preset_names() {
    std::vector<std::string_view> out;
    for (const auto& [name, text] : detail::preset_table()) out.push_back(name);
    return out;
}

std::string_view preset_text(std::string_view name) {
    for (const auto& [key, text] : detail::preset_table()) {
        if (key == name) return text;
    }
    std::string known;
    for (auto n : preset_names()) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

simkit::Scenario load_preset(std::string_view name) {
    const auto text = preset_text(name);
    try {
        return parse_scenario(text);
    } catch (const ConfigError& e) {
        throw ConfigError("preset " + std::string(name) + ": " + e.what());
    }
}

}  // namespace obslab::cli
