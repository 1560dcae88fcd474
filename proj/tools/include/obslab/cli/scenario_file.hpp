#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "obslab/cli/toml.hpp"
#include "obslab/simkit.hpp"

// Scenario <-> TOML mapping.
//
// Sections: [plant] [estimator] [approximator] [controller] [sim] [noise],
// plus a top-level `name`. Omitted sections take the defaults of
// simkit::Scenario; a section that is present must carry its key fields
// (kind for estimator/approximator/controller, t_end and step for sim,
// amplitude for noise). Unknown sections and keys are rejected.
namespace obslab::cli {

/// Configuration or usage problem; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

simkit::Scenario scenario_from_document(const toml::Document& doc);

/// Throws ConfigError (with line/column for syntax errors).
simkit::Scenario parse_scenario(std::string_view text);

simkit::Scenario load_scenario_file(const std::string& path);

/// Every field written explicitly, so parse_scenario(to_toml(s)) == s.
toml::Document to_document(const simkit::Scenario& s);
std::string to_toml(const simkit::Scenario& s);

std::string_view to_string(simkit::ControllerKind kind);
std::string_view to_string(estimators::EstimatorKind kind);
std::string_view to_string(simkit::ApproximatorKind kind);
std::string_view to_string(simkit::ControlMemory memory);

}  // namespace obslab::cli
