#pragma once

// Experiment configuration files: INI sections [network], [arrivals],
// [channel], [run] and [experiment]. Every key is optional and falls back to
// the built-in defaults; unknown sections or keys are rejected. Parsing only
// checks syntax and types; call validate() once overrides are applied.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hcran/harness.hpp"

namespace hcran {

struct ExperimentConfig {
    Scenario scenario;
    std::optional<SweepAxis> axis;
    std::vector<double> values;
    std::filesystem::path output_dir = "out";
    bool run_jccro = true;
    bool run_msr = false;

    /// Throws ConfigError; checks the scenario and that sweep values increase.
    void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// "10,100,1000" -> {10, 100, 1000}.
std::vector<double> parse_values(const std::string& csv);

}  // namespace hcran
