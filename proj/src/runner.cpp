#include "sgn/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sgn/errors.hpp"
#include "sgn/viscosity.hpp"

namespace sgn {

namespace fs = std::filesystem;

double RunResult::mass_drift() const
{
    return invariants.size() ? std::abs(invariants.mass.back() - invariants.mass.front()) : 0.0;
}

double RunResult::energy_drift() const
{
    return invariants.size() ? std::abs(invariants.energy.back() - invariants.energy.front()) : 0.0;
}

double RunResult::relative_energy_drift() const
{
    if (!invariants.size() || invariants.energy.front() == 0.0) {
        return 0.0;
    }
    return energy_drift() / std::abs(invariants.energy.front());
}

Setup prepare(const RunConfig& config)
{
    validate(config);
    Setup s;
    s.scenario = make_scenario(config.scenario, config.scenario_params, config.g);
    s.grid = make_grid(s.scenario.x_min, s.scenario.x_max, s.scenario.n);
    s.x = s.grid.nodes();

    const OperatorMode mode = parse_operator_mode(config.operator_mode);
    const OperatorSet ops = mode == OperatorMode::upwind ? upwind_operator_set(s.grid, config.order)
                                                         : central_operator_set(s.grid, config.order);
    const Field b = s.scenario.bathymetry(s.x);
    ModelParams params{config.g, config.lambda};
    s.model = make_model(parse_model_kind(config.model), parse_variant(config.variant), ops, b, params, mode);
    if (config.av.enabled) {
        s.model->set_viscosity(av_coefficient(s.grid.dx, config.order, config.av.c));
    }
    if (s.scenario.sources) {
        const Field x = s.x;
        auto src = s.scenario.sources;
        s.model->set_source([x, src](double t, std::vector<Field>& out) { src(x, t, out); });
    }
    const FlowFields f = s.scenario.initial(s.x);
    s.y0 = s.model->initial_state(f.h, f.u);

    IntegrateOptions& o = s.options;
    o.tableau = tableau_by_name(resolved_tableau(config));
    o.control.abs_tol = config.abs_tol;
    o.control.rel_tol = config.rel_tol;
    o.adaptive = config.adaptive;
    o.dt = config.dt;
    o.relax = config.relax;
    o.stop_times = config.snapshot_times;
    return s;
}

std::string output_directory(const RunConfig& config)
{
    if (const char* env = std::getenv("SGN_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return config.output_dir;
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::string& path)
{
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            }
            catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (numeric && !row.empty()) {
            rows.push_back(row);
        }
    }
    return rows;
}

double interpolate_time(const std::vector<double>& t, const std::vector<double>& v, double tq)
{
    if (t.empty()) {
        return std::nan("");
    }
    if (tq <= t.front()) {
        return v.front();
    }
    if (tq >= t.back()) {
        return v.back();
    }
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const double th = (tq - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - th) * v[j - 1] + th * v[j];
}

void write_overlay(const std::string& ref_path, const std::string& out_path, const RunResult& r)
{
    const auto rows = read_numeric_csv(ref_path);
    std::ofstream out(out_path);
    out << "t";
    const std::size_t cols = rows.empty() ? 0 : std::min(rows.front().size() - 1, r.gauge_x.size());
    for (std::size_t k = 0; k < cols; ++k) {
        out << ",reference" << k + 1 << ",simulated" << k + 1;
    }
    out << '\n';
    for (const auto& row : rows) {
        out << format_double(row[0]);
        for (std::size_t k = 0; k < cols; ++k) {
            if (k + 1 >= row.size()) {
                out << ",,";
                continue;
            }
            const double sim = interpolate_time(r.gauge_times, r.gauge_values[k], row[0]);
            out << ',' << format_double(row[k + 1]) << ',' << format_double(sim);
        }
        out << '\n';
    }
}

std::vector<std::pair<std::string, Field>> named_fields(const Model& m, const State& y)
{
    std::vector<std::pair<std::string, Field>> out;
    const auto names = m.field_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        out.emplace_back(names[k], m.field(y, k));
    }
    return out;
}

} // namespace

RunResult run(const RunConfig& config, const RunHooks& hooks)
{
    const auto start = std::chrono::steady_clock::now();
    Setup s = prepare(config);
    Model& model = *s.model;
    RunResult r;
    r.label = config.model + "/" + config.variant + "/" + config.operator_mode + "/p" +
              std::to_string(config.order) + "/" + config.scenario;

    r.gauge_x = config.gauges;
    if (!config.gauge_file.empty()) {
        const auto extra = load_gauges(config.gauge_file);
        r.gauge_x.insert(r.gauge_x.end(), extra.begin(), extra.end());
    }
    if (r.gauge_x.empty()) {
        r.gauge_x = s.scenario.gauges;
    }
    for (double xg : r.gauge_x) {
        if (xg < s.grid.x_min || xg > s.grid.x_max) {
            throw ConfigError("gauge at x = " + format_double(xg) + " lies outside the domain");
        }
    }
    r.gauge_values.assign(r.gauge_x.size(), {});
    const Field& b = model.bathymetry();

    const auto record = [&](double t, const State& y, double gamma, double dt) {
        r.invariants.push(t, model.mass(y), model.momentum(y), model.energy(y), gamma, dt);
        if (!r.gauge_x.empty()) {
            const Field surface = model.field(y, 0) + b;
            r.gauge_times.push_back(t);
            for (std::size_t k = 0; k < r.gauge_x.size(); ++k) {
                r.gauge_values[k].push_back(interpolate_periodic(s.grid, surface, r.gauge_x[k]));
            }
        }
    };

    {
        State dy;
        model.rhs(0.0, s.y0, dy);
        const std::size_t n = model.n();
        for (std::size_t k = 0; k < model.n_fields(); ++k) {
            const double norm = std::sqrt((model.ops().mass.weights * dy.segment(k * n, n).array().square()).sum());
            r.initial_rhs_norm = std::max(r.initial_rhs_norm, norm);
        }
    }
    record(0.0, s.y0, 1.0, 0.0);

    std::vector<double> pending = config.snapshot_times;
    std::sort(pending.begin(), pending.end());
    Problem problem;
    problem.rhs = [&model](double t, const Vector& y, Vector& dy) { model.rhs(t, y, dy); };
    problem.energy = [&model](const Vector& y) { return model.energy(y); };
    problem.y0 = s.y0;
    problem.t0 = 0.0;
    problem.t_end = s.scenario.t_end;

    IntegrateOptions opts = s.options;
    opts.on_accept = [&](const StepInfo& info) {
        record(info.t, *info.y, info.gamma, info.dt);
        for (double ts : pending) {
            if (std::abs(ts - info.t) <= 1e-12 * std::max(1.0, std::abs(ts))) {
                r.snapshots.push_back(Snapshot{info.t, *info.y});
            }
        }
        if (hooks.on_accept) {
            hooks.on_accept(model, info);
        }
    };
    Trajectory tr = integrate(problem, opts);
    r.y_final = tr.y_final;
    r.t_final = tr.t_final;
    r.stats = tr.stats;

    if (s.scenario.exact) {
        const FlowFields ex = s.scenario.exact(s.x, r.t_final);
        r.error_h = l2_error(model.field(r.y_final, 0), ex.h, model.ops().mass);
        r.error_u = l2_error(model.field(r.y_final, 1), ex.u, model.ops().mass);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (config.write_files) {
        const fs::path dir = output_directory(config);
        fs::create_directories(dir);
        write_invariants_csv((dir / "invariants.csv").string(), r.invariants);
        write_snapshot_csv((dir / "snapshot_final.csv").string(), s.x, b, named_fields(model, r.y_final));
        for (const Snapshot& snap : r.snapshots) {
            write_snapshot_csv((dir / ("snapshot_t" + format_double(snap.t) + ".csv")).string(), s.x, b,
                               named_fields(model, snap.values));
        }
        if (!r.gauge_x.empty()) {
            write_gauges_csv((dir / "gauges.csv").string(), r.gauge_x, r.gauge_times, r.gauge_values);
        }
        if (!config.reference_file.empty()) {
            if (fs::exists(config.reference_file)) {
                write_overlay(config.reference_file, (dir / "overlay.csv").string(), r);
            }
            else {
                std::cerr << "warning: reference file '" << config.reference_file
                          << "' not found, skipping overlay\n";
            }
        }
    }
    return r;
}

std::string summary_line(const RunConfig& config, const RunResult& r)
{
    std::ostringstream out;
    out << "run " << r.label << " t=" << format_double(r.t_final) << " steps=" << r.stats.accepted
        << " rejected=" << r.stats.rejected << " rhs_norm0=" << format_double(r.initial_rhs_norm)
        << " mass_drift=" << format_double(r.mass_drift())
        << " energy_drift_rel=" << format_double(r.relative_energy_drift());
    if (r.error_h) {
        out << " l2_h=" << format_double(*r.error_h) << " l2_u=" << format_double(*r.error_u);
    }
    if (config.relax) {
        out << " relaxation_failures=" << r.stats.relaxation_failures;
    }
    out << " seed=" << config.seed;
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.2f", r.wall_seconds);
    out << " wall=" << wall << "s";
    return out.str();
}

} // namespace sgn
