#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "sgn/errors.hpp"
#include "sgn/runner.hpp"

namespace sgn {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v)
{
    return format_double(v);
}

std::string fmt_opt(const std::optional<double>& v)
{
    return v ? format_double(*v) : "";
}

RunConfig quiet(RunConfig c)
{
    c.write_files = false;
    c.study.reset();
    return c;
}

template <class F>
StudyRow guarded(F&& f, const std::vector<std::pair<std::string, std::string>>& keys)
{
    StudyRow row;
    try {
        row = f();
    }
    catch (const std::exception& e) {
        row.columns = keys;
        row.error = e.what();
    }
    return row;
}

void log_row(std::ostream* log, const StudyRow& row)
{
    if (!log) {
        return;
    }
    for (const auto& [k, v] : row.columns) {
        *log << k << '=' << v << ' ';
    }
    if (!row.error.empty()) {
        *log << "error=\"" << row.error << '"';
    }
    *log << '\n';
}

// Fills pairwise EOC columns for consecutive rows sharing `group`.
void add_eoc(std::vector<StudyRow>& rows, const std::string& group, const std::string& size_key,
             const std::string& err_key, const std::string& eoc_key, bool inverse = false)
{
    const auto value = [](const StudyRow& r, const std::string& k) -> std::optional<double> {
        for (const auto& [key, v] : r.columns) {
            if (key == k && !v.empty()) {
                return std::stod(v);
            }
        }
        return std::nullopt;
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string out;
        if (i > 0 && rows[i].error.empty() && rows[i - 1].error.empty() &&
            (group.empty() || value(rows[i], group) == value(rows[i - 1], group))) {
            const auto e0 = value(rows[i - 1], err_key);
            const auto e1 = value(rows[i], err_key);
            const auto n0 = value(rows[i - 1], size_key);
            const auto n1 = value(rows[i], size_key);
            if (e0 && e1 && n0 && n1 && *e0 > 0.0 && *e1 > 0.0) {
                const double r = inverse ? eoc({*e0, *e1}, {1.0 / *n0, 1.0 / *n1})[0] : eoc({*e0, *e1}, {*n0, *n1})[0];
                out = fmt(r);
            }
        }
        rows[i].columns.emplace_back(eoc_key, out);
    }
}

} // namespace

StudyResult study(const RunConfig& config, std::ostream* log)
{
    validate(config);
    if (!config.study) {
        throw ConfigError("no [study] section in the configuration");
    }
    const StudyConfig& sc = *config.study;
    StudyResult result;
    const RunConfig base = quiet(config);

    if (sc.kind == "grid-convergence") {
        std::vector<double> orders = sc.orders.empty() ? std::vector<double>{double(config.order)} : sc.orders;
        for (double order : orders) {
            for (double n : sc.values) {
                const std::vector<std::pair<std::string, std::string>> keys{{"order", fmt(order)}, {"n", fmt(n)}};
                StudyRow row = guarded(
                    [&] {
                        RunConfig c = base;
                        c.order = static_cast<int>(order);
                        c.scenario_params["n"] = n;
                        const RunResult r = run(c);
                        if (!r.error_h) {
                            throw ConfigError("grid-convergence needs a scenario with a reference solution");
                        }
                        StudyRow out;
                        out.columns = keys;
                        out.columns.emplace_back("error_h", fmt_opt(r.error_h));
                        out.columns.emplace_back("error_u", fmt_opt(r.error_u));
                        return out;
                    },
                    keys);
                if (!row.error.empty()) {
                    row.columns.emplace_back("error_h", "");
                    row.columns.emplace_back("error_u", "");
                }
                log_row(log, row);
                result.rows.push_back(row);
            }
        }
        add_eoc(result.rows, "order", "n", "error_h", "eoc_h");
        add_eoc(result.rows, "order", "n", "error_u", "eoc_u");
    }
    else if (sc.kind == "lambda-convergence") {
        if (config.model != "sgn-hyperbolic") {
            throw ConfigError("lambda-convergence requires model sgn-hyperbolic");
        }
        for (double lam : sc.values) {
            const std::vector<std::pair<std::string, std::string>> keys{{"lambda", fmt(lam)}};
            StudyRow row = guarded(
                [&] {
                    RunConfig c = base;
                    c.lambda = lam;
                    c.lambda_set = true;
                    const RunResult r = run(c);
                    if (!r.error_h) {
                        throw ConfigError("lambda-convergence needs a scenario with a reference solution");
                    }
                    StudyRow out;
                    out.columns = keys;
                    out.columns.emplace_back("error_h", fmt_opt(r.error_h));
                    out.columns.emplace_back("error_u", fmt_opt(r.error_u));
                    return out;
                },
                keys);
            if (!row.error.empty()) {
                row.columns.emplace_back("error_h", "");
                row.columns.emplace_back("error_u", "");
            }
            log_row(log, row);
            result.rows.push_back(row);
        }
        add_eoc(result.rows, "", "lambda", "error_h", "eoc_h");
        add_eoc(result.rows, "", "lambda", "error_u", "eoc_u");
    }
    else if (sc.kind == "dt-conservation") {
        for (double dt : sc.values) {
            const std::vector<std::pair<std::string, std::string>> keys{{"dt", fmt(dt)}};
            StudyRow row = guarded(
                [&] {
                    RunConfig c = base;
                    c.adaptive = false;
                    c.dt = dt;
                    const RunResult r = run(c);
                    const InvariantSeries& s = r.invariants;
                    StudyRow out;
                    out.columns = keys;
                    out.columns.emplace_back("error_mass", fmt(std::abs(s.mass.back() - s.mass.front())));
                    out.columns.emplace_back("error_momentum",
                                             fmt(std::abs(s.momentum.back() - s.momentum.front())));
                    out.columns.emplace_back("error_energy", fmt(std::abs(s.energy.back() - s.energy.front())));
                    return out;
                },
                keys);
            if (!row.error.empty()) {
                row.columns.emplace_back("error_mass", "");
                row.columns.emplace_back("error_momentum", "");
                row.columns.emplace_back("error_energy", "");
            }
            log_row(log, row);
            result.rows.push_back(row);
        }
        add_eoc(result.rows, "", "dt", "error_momentum", "eoc_momentum", true);
        add_eoc(result.rows, "", "dt", "error_energy", "eoc_energy", true);
    }
    else if (sc.kind == "froude-sweep") {
        if (config.scenario != "favre") {
            throw ConfigError("froude-sweep requires scenario favre");
        }
        for (double eps : sc.values) {
            const std::vector<std::pair<std::string, std::string>> keys{{"epsilon", fmt(eps)}};
            StudyRow row = guarded(
                [&] {
                    RunConfig c = base;
                    c.scenario_params["epsilon"] = eps;
                    const Setup s = prepare(c);
                    const double h0 = s.scenario.params.at("h0");
                    const double x0 = s.scenario.params.at("x0");
                    FavreParams fp;
                    fp.h0 = h0;
                    fp.epsilon = eps;
                    const RunResult r = run(c);
                    const Field h = s.model->field(r.y_final, 0);
                    const auto wave = leading_wave(s.x, h, Window{x0, s.grid.x_max}, fp.h1(), h0);
                    if (!wave) {
                        throw NumericalFailure("no undulation above h1 found");
                    }
                    StudyRow out;
                    out.columns = keys;
                    out.columns.emplace_back("froude", fmt(fp.froude()));
                    out.columns.emplace_back("a_max", fmt(wave->amplitude / h0));
                    return out;
                },
                keys);
            if (!row.error.empty()) {
                row.columns.emplace_back("froude", "");
                row.columns.emplace_back("a_max", "");
            }
            log_row(log, row);
            result.rows.push_back(row);
        }
    }
    else if (sc.kind == "error-growth") {
        std::vector<double> relax = sc.values.empty() ? std::vector<double>{0.0, 1.0} : sc.values;
        for (double rl : relax) {
            const std::vector<std::pair<std::string, std::string>> keys{{"relax", fmt(rl)}};
            StudyRow row = guarded(
                [&] {
                    RunConfig c = base;
                    c.relax = rl != 0.0;
                    const Setup s = prepare(c);
                    if (!s.scenario.exact) {
                        throw ConfigError("error-growth needs a scenario with a reference solution");
                    }
                    std::vector<double> ts, es;
                    RunHooks hooks;
                    const Field x = s.x;
                    auto exact = s.scenario.exact;
                    hooks.on_accept = [&](const Model& m, const StepInfo& info) {
                        const FlowFields ex = exact(x, info.t);
                        ts.push_back(info.t);
                        es.push_back(l2_error(m.field(*info.y, 0), ex.h, m.ops().mass));
                    };
                    const RunResult r = run(c, hooks);
                    const fs::path dir = output_directory(config);
                    fs::create_directories(dir);
                    std::ofstream series(dir / ("error_growth_relax" + std::to_string(int(rl)) + ".csv"));
                    series << "t,error_h\n";
                    for (std::size_t i = 0; i < ts.size(); ++i) {
                        series << fmt(ts[i]) << ',' << fmt(es[i]) << '\n';
                    }
                    StudyRow out;
                    out.columns = keys;
                    out.columns.emplace_back("growth_exponent", fmt(growth_exponent(ts, es)));
                    out.columns.emplace_back("final_error_h", fmt(es.back()));
                    out.columns.emplace_back("energy_drift_rel", fmt(r.relative_energy_drift()));
                    return out;
                },
                keys);
            if (!row.error.empty()) {
                row.columns.emplace_back("growth_exponent", "");
                row.columns.emplace_back("final_error_h", "");
                row.columns.emplace_back("energy_drift_rel", "");
            }
            log_row(log, row);
            result.rows.push_back(row);
        }
    }

    result.header.clear();
    for (const auto& row : result.rows) {
        if (row.columns.size() > result.header.size()) {
            result.header.clear();
            for (const auto& c : row.columns) {
                result.header.push_back(c.first);
            }
        }
    }
    const fs::path dir = output_directory(config);
    fs::create_directories(dir);
    std::string kind = sc.kind;
    std::replace(kind.begin(), kind.end(), '-', '_');
    result.path = (dir / ("study_" + kind + ".csv")).string();
    std::ofstream out(result.path);
    if (!out) {
        throw ConfigError("cannot write '" + result.path + "'");
    }
    for (std::size_t i = 0; i < result.header.size(); ++i) {
        out << (i ? "," : "") << result.header[i];
    }
    out << ",status\n";
    for (const auto& row : result.rows) {
        std::map<std::string, std::string> cells(row.columns.begin(), row.columns.end());
        for (std::size_t i = 0; i < result.header.size(); ++i) {
            out << (i ? "," : "") << cells[result.header[i]];
        }
        std::string status = row.error.empty() ? "ok" : row.error;
        std::replace(status.begin(), status.end(), ',', ';');
        out << ',' << status << '\n';
    }

    if (sc.kind == "froude-sweep" && !config.reference_file.empty()) {
        if (fs::exists(config.reference_file)) {
            std::ifstream ref(config.reference_file);
            std::ofstream overlay(dir / "favre_overlay.csv");
            overlay << "source,froude,a_max\n";
            std::string line;
            while (std::getline(ref, line)) {
                std::stringstream ss(line);
                std::string a, b;
                if (std::getline(ss, a, ',') && std::getline(ss, b, ',')) {
                    try {
                        overlay << "reference," << fmt(std::stod(a)) << ',' << fmt(std::stod(b)) << '\n';
                    }
                    catch (const std::exception&) {
                    }
                }
            }
            for (const auto& row : result.rows) {
                std::map<std::string, std::string> cells(row.columns.begin(), row.columns.end());
                if (row.error.empty()) {
                    overlay << "simulated," << cells["froude"] << ',' << cells["a_max"] << '\n';
                }
            }
        }
        else if (log) {
            *log << "warning: reference file '" << config.reference_file << "' not found, skipping overlay\n";
        }
    }
    return result;
}

} // namespace sgn
