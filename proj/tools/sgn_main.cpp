// Command-line driver: run, study, check-operators, list-scenarios.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sgn/config.hpp"
#include "sgn/diagnostics.hpp"
#include "sgn/errors.hpp"
#include "sgn/runner.hpp"
#include "sgn/scenarios.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string model, variant, mode, scenario, tableau, output, gauge_file, reference;
    int order = 0;
    double n = 0, lambda = -1, g = 0, t_end = 0, dt = 0, abs_tol = 0, rel_tol = 0, av_constant = -1;
    bool fixed_step = false, relax = false, av = false, no_files = false;
    long seed = -1;
    std::vector<std::string> params;
    std::vector<double> gauges, snapshot_times;
    std::string kind;
    std::vector<double> values, orders;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("-c,--config", o.config_path, "TOML-style configuration file");
    app->add_option("--model", o.model, "swe | sgn-hyperbolic | sgn-original");
    app->add_option("--variant", o.variant, "flat | variable | mild | full");
    app->add_option("--operator-mode", o.mode, "central | upwind");
    app->add_option("--order", o.order, "accuracy order of the SBP operators");
    app->add_option("-n,--nodes", o.n, "number of grid nodes");
    app->add_option("--scenario", o.scenario, "scenario name (see list-scenarios)");
    app->add_option("-p,--param", o.params, "scenario parameter key=value (repeatable)");
    app->add_option("--lambda", o.lambda, "hyperbolic relaxation parameter");
    app->add_option("--g", o.g, "gravitational acceleration");
    app->add_option("--t-end", o.t_end, "final time");
    app->add_option("--dt", o.dt, "fixed step (with --fixed-step) or initial step");
    app->add_flag("--fixed-step", o.fixed_step, "disable step-size control");
    app->add_option("--tableau", o.tableau, "dp5 | tsit5 | bs3");
    app->add_option("--abs-tol", o.abs_tol, "absolute tolerance");
    app->add_option("--rel-tol", o.rel_tol, "relative tolerance");
    app->add_flag("--relax", o.relax, "relaxation for exact energy conservation");
    app->add_flag("--av", o.av, "enable artificial viscosity");
    app->add_option("--av-constant", o.av_constant, "artificial viscosity constant C");
    app->add_option("-o,--output", o.output, "output directory");
    app->add_option("--gauges", o.gauges, "gauge positions");
    app->add_option("--gauge-file", o.gauge_file, "file with gauge positions");
    app->add_option("--reference", o.reference, "reference data for overlay CSVs");
    app->add_option("--snapshot-times", o.snapshot_times, "times at which to store snapshots");
    app->add_option("--seed", o.seed, "run seed (recorded in the summary)");
    app->add_flag("--no-files", o.no_files, "do not write CSV files");
}

sgn::RunConfig build_config(const Overrides& o)
{
    sgn::RunConfig c = o.config_path.empty() ? sgn::RunConfig{} : sgn::load_config(o.config_path);
    if (!o.model.empty()) c.model = o.model;
    if (!o.variant.empty()) c.variant = o.variant;
    if (!o.mode.empty()) c.operator_mode = o.mode;
    if (o.order) c.order = o.order;
    if (!o.scenario.empty()) c.scenario = o.scenario;
    for (const std::string& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw sgn::ConfigError("--param expects key=value, got '" + kv + "'");
        }
        try {
            c.scenario_params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        catch (const std::exception&) {
            throw sgn::ConfigError("--param value must be numeric in '" + kv + "'");
        }
    }
    if (o.n > 0) c.scenario_params["n"] = o.n;
    if (o.t_end > 0) c.scenario_params["t_end"] = o.t_end;
    if (o.lambda >= 0) {
        c.lambda = o.lambda;
        c.lambda_set = true;
    }
    if (o.g > 0) c.g = o.g;
    if (o.dt > 0) c.dt = o.dt;
    if (o.fixed_step) c.adaptive = false;
    if (!o.tableau.empty()) c.tableau = o.tableau;
    if (o.abs_tol > 0) c.abs_tol = o.abs_tol;
    if (o.rel_tol > 0) c.rel_tol = o.rel_tol;
    if (o.relax) c.relax = true;
    if (o.av) c.av.enabled = true;
    if (o.av_constant >= 0) c.av.c = o.av_constant;
    if (!o.output.empty()) c.output_dir = o.output;
    if (!o.gauges.empty()) c.gauges = o.gauges;
    if (!o.gauge_file.empty()) c.gauge_file = o.gauge_file;
    if (!o.reference.empty()) c.reference_file = o.reference;
    if (!o.snapshot_times.empty()) c.snapshot_times = o.snapshot_times;
    if (o.seed >= 0) c.seed = static_cast<unsigned long>(o.seed);
    if (o.no_files) c.write_files = false;
    if (!o.kind.empty() || !o.values.empty() || !o.orders.empty()) {
        if (!c.study) {
            c.study = sgn::StudyConfig{};
        }
        if (!o.kind.empty()) c.study->kind = o.kind;
        if (!o.values.empty()) c.study->values = o.values;
        if (!o.orders.empty()) c.study->orders = o.orders;
    }
    return c;
}

int check_operators(const std::vector<int>& sizes)
{
    std::printf("%-8s %5s %5s %12s %12s %12s %12s\n", "kind", "order", "n", "central", "adjoint", "max_eig",
                "consistency");
    bool ok = true;
    for (int n : sizes) {
        const sgn::PeriodicGrid grid = sgn::make_grid(0.0, 1.0, static_cast<std::size_t>(n));
        for (int p : {2, 4, 6}) {
            if (static_cast<std::size_t>(n) <= static_cast<std::size_t>(p + 1)) {
                continue;
            }
            const auto r = sgn::sbp_residuals(sgn::central_operator_set(grid, p));
            ok = ok && r.central_residual <= 1e-13;
            std::printf("%-8s %5d %5d %12.3e %12s %12s %12.3e\n", "central", p, n, r.central_residual, "-", "-",
                        r.consistency_residual);
        }
        for (int p = 1; p <= 6; ++p) {
            if (static_cast<std::size_t>(n) <= static_cast<std::size_t>(p + 2)) {
                continue;
            }
            const auto r = sgn::sbp_residuals(sgn::upwind_operator_set(grid, p));
            ok = ok && r.central_residual <= 1e-13 && r.upwind_adjoint_residual <= 1e-13 &&
                 r.dissipativity_max_eig <= 1e-12;
            std::printf("%-8s %5d %5d %12.3e %12.3e %12.3e %12.3e\n", "upwind", p, n, r.central_residual,
                        r.upwind_adjoint_residual, r.dissipativity_max_eig, r.consistency_residual);
        }
    }
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structure-preserving solvers for dispersive shallow water models"};
    app.require_subcommand(1);

    Overrides run_o;
    CLI::App* run_cmd = app.add_subcommand("run", "integrate one configuration");
    add_common(run_cmd, run_o);

    Overrides study_o;
    CLI::App* study_cmd = app.add_subcommand("study", "parameter sweep with a summary CSV");
    add_common(study_cmd, study_o);
    study_cmd->add_option("--kind", study_o.kind,
                          "grid-convergence | lambda-convergence | dt-conservation | froude-sweep | error-growth");
    study_cmd->add_option("--values", study_o.values, "sweep values (N, lambda, dt, epsilon or relax flags)");
    study_cmd->add_option("--orders", study_o.orders, "operator orders for grid-convergence");

    std::vector<int> sizes{8, 16, 32, 64, 128, 256, 512};
    CLI::App* check_cmd = app.add_subcommand("check-operators", "print SBP residuals of all shipped operators");
    check_cmd->add_option("--sizes", sizes, "grid sizes");

    CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list scenario names and parameters");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run_cmd) {
            const sgn::RunConfig c = build_config(run_o);
            const sgn::RunResult r = sgn::run(c);
            std::cout << sgn::summary_line(c, r) << std::endl;
            return 0;
        }
        if (*study_cmd) {
            const sgn::RunConfig c = build_config(study_o);
            const sgn::StudyResult s = sgn::study(c, &std::cout);
            std::size_t failed = 0;
            for (const auto& row : s.rows) {
                failed += row.error.empty() ? 0 : 1;
            }
            std::cout << "study " << c.study->kind << " rows=" << s.rows.size() << " failed=" << failed
                      << " csv=" << s.path << std::endl;
            return failed ? 2 : 0;
        }
        if (*check_cmd) {
            return check_operators(sizes);
        }
        if (*list_cmd) {
            for (const std::string& name : sgn::scenario_names()) {
                const sgn::Scenario s = sgn::make_scenario(name);
                std::cout << name << ": " << s.description << "\n   ";
                for (const auto& [k, v] : s.params) {
                    std::cout << ' ' << k << '=' << sgn::format_double(v);
                }
                std::cout << '\n';
            }
            return 0;
        }
    }
    catch (const sgn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 1;
    }
    catch (const sgn::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 1;
    }
    catch (const sgn::StateError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 2;
    }
    catch (const sgn::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
