#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgn/config.hpp"
#include "sgn/diagnostics.hpp"
#include "sgn/model.hpp"
#include "sgn/time_integration.hpp"

namespace sgn {

/// Everything needed to integrate one configuration.
struct Setup {
    Scenario scenario;
    PeriodicGrid grid;
    Field x;
    std::unique_ptr<Model> model;
    State y0;
    IntegrateOptions options;
};

Setup prepare(const RunConfig& config);

struct RunResult {
    std::string label;
    State y_final;
    double t_final = 0.0;
    IntegrateStats stats;
    InvariantSeries invariants;
    std::vector<double> gauge_x;
    std::vector<double> gauge_times;
    std::vector<std::vector<double>> gauge_values;
    std::vector<Snapshot> snapshots;
    /// Max over components of the L2 norm of the right-hand side at t = 0.
    double initial_rhs_norm = 0.0;
    std::optional<double> error_h;
    std::optional<double> error_u;
    double wall_seconds = 0.0;

    double mass_drift() const;
    double energy_drift() const;
    double relative_energy_drift() const;
};

struct RunHooks {
    /// Called on every accepted step with the model and the current state.
    std::function<void(const Model&, const StepInfo&)> on_accept;
};

/// Integrates the configuration. Writes CSV files when config.write_files is set;
/// the output directory can be overridden with SGN_OUTPUT_DIR.
RunResult run(const RunConfig& config, const RunHooks& hooks = {});

std::string summary_line(const RunConfig& config, const RunResult& r);

std::string output_directory(const RunConfig& config);

struct StudyRow {
    std::vector<std::pair<std::string, std::string>> columns;
    std::string error;
};

struct StudyResult {
    std::vector<std::string> header;
    std::vector<StudyRow> rows;
    std::string path;
};

/// Runs config.study over its sweep and writes study_<kind>.csv.
StudyResult study(const RunConfig& config, std::ostream* log = nullptr);

} // namespace sgn
