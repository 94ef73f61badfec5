#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sgn/scenarios.hpp"
#include "sgn/viscosity.hpp"

namespace sgn {

/// Values of the small TOML subset used for run files: numbers, booleans,
/// strings and flat arrays of numbers.
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;
/// Keys are "section.key".
using ConfigTable = std::map<std::string, ConfigValue>;

ConfigTable parse_toml(const std::string& text);

struct StudyConfig {
    std::string kind;
    std::vector<double> values;
    std::vector<double> orders;
};

struct RunConfig {
    std::string model = "sgn-original";
    std::string variant = "flat";
    std::string operator_mode = "central";
    int order = 2;
    double g = 9.81;
    double lambda = 500.0;
    bool lambda_set = false;

    std::string scenario = "soliton";
    ScenarioParams scenario_params;

    /// Empty picks dp5, or bs3 for the hyperbolic model.
    std::string tableau;
    bool adaptive = true;
    double dt = 0.0;
    double abs_tol = 1e-5;
    double rel_tol = 1e-5;
    bool relax = false;
    std::vector<double> snapshot_times;

    AvConfig av;

    std::string output_dir = "output";
    bool write_files = true;
    std::vector<double> gauges;
    std::string gauge_file;
    std::string reference_file;

    unsigned long seed = 0;

    std::optional<StudyConfig> study;
};

RunConfig config_from_table(const ConfigTable& table);
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
std::string serialize(const RunConfig& c);

/// Throws ConfigError with an actionable message on invalid combinations.
void validate(const RunConfig& c);

std::string resolved_tableau(const RunConfig& c);

} // namespace sgn
