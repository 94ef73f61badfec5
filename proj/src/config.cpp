#include "sgn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "sgn/diagnostics.hpp"
#include "sgn/errors.hpp"
#include "sgn/model.hpp"

namespace sgn {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line)
{
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        }
        else if (line[i] == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

double parse_number(const std::string& s, int line_no)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    }
    catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(s.substr(used)) != "") {
        throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + s + "'");
    }
    return v;
}

ConfigValue parse_value(const std::string& raw, int line_no)
{
    const std::string s = trim(raw);
    if (s.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": missing value");
    }
    if (s == "true" || s == "false") {
        return s == "true";
    }
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') {
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        }
        return s.substr(1, s.size() - 2);
    }
    if (s.front() == '[') {
        if (s.back() != ']') {
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
        }
        std::vector<double> out;
        std::stringstream ss(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) {
                continue;
            }
            out.push_back(parse_number(trim(item), line_no));
        }
        return out;
    }
    return parse_number(s, line_no);
}

const char* type_name(const ConfigValue& v)
{
    switch (v.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    default: return "array";
    }
}

template <class T>
T expect(const std::string& key, const ConfigValue& v)
{
    if (const T* p = std::get_if<T>(&v)) {
        return *p;
    }
    std::string want = std::is_same_v<T, double> ? "number" : std::is_same_v<T, bool> ? "boolean"
                                                          : std::is_same_v<T, std::string> ? "string"
                                                                                            : "array";
    throw ConfigError("key '" + key + "' expects a " + want + ", got a " + type_name(v));
}

int expect_int(const std::string& key, const ConfigValue& v)
{
    const double d = expect<double>(key, v);
    if (d != std::floor(d)) {
        throw ConfigError("key '" + key + "' expects an integer");
    }
    return static_cast<int>(d);
}

std::string quote(const std::string& s)
{
    return "\"" + s + "\"";
}

std::string array(const std::vector<double>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + format_double(v[i]);
    }
    return out + "]";
}

} // namespace

ConfigTable parse_toml(const std::string& text)
{
    ConfigTable table;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        }
        table[full] = parse_value(s.substr(eq + 1), line_no);
    }
    return table;
}

RunConfig config_from_table(const ConfigTable& table)
{
    RunConfig c;
    StudyConfig study;
    bool has_study = false;
    for (const auto& [key, v] : table) {
        const auto dot = key.find('.');
        const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (section == "model") {
            if (name == "kind") c.model = expect<std::string>(key, v);
            else if (name == "variant") c.variant = expect<std::string>(key, v);
            else if (name == "operator_mode") c.operator_mode = expect<std::string>(key, v);
            else if (name == "order") c.order = expect_int(key, v);
            else if (name == "g") c.g = expect<double>(key, v);
            else if (name == "lambda") {
                c.lambda = expect<double>(key, v);
                c.lambda_set = true;
            }
            else throw ConfigError("unknown key '" + key + "'");
        }
        else if (section == "scenario") {
            if (name == "name") c.scenario = expect<std::string>(key, v);
            else c.scenario_params[name] = expect<double>(key, v);
        }
        else if (section == "time") {
            if (name == "tableau") c.tableau = expect<std::string>(key, v);
            else if (name == "adaptive") c.adaptive = expect<bool>(key, v);
            else if (name == "dt") c.dt = expect<double>(key, v);
            else if (name == "abs_tol") c.abs_tol = expect<double>(key, v);
            else if (name == "rel_tol") c.rel_tol = expect<double>(key, v);
            else if (name == "relax") c.relax = expect<bool>(key, v);
            else if (name == "snapshot_times") c.snapshot_times = expect<std::vector<double>>(key, v);
            else throw ConfigError("unknown key '" + key + "'");
        }
        else if (section == "av") {
            if (name == "enabled") c.av.enabled = expect<bool>(key, v);
            else if (name == "constant") c.av.c = expect<double>(key, v);
            else throw ConfigError("unknown key '" + key + "'");
        }
        else if (section == "output") {
            if (name == "dir") c.output_dir = expect<std::string>(key, v);
            else if (name == "write_files") c.write_files = expect<bool>(key, v);
            else if (name == "gauges") c.gauges = expect<std::vector<double>>(key, v);
            else if (name == "gauge_file") c.gauge_file = expect<std::string>(key, v);
            else if (name == "reference_file") c.reference_file = expect<std::string>(key, v);
            else throw ConfigError("unknown key '" + key + "'");
        }
        else if (section == "run") {
            if (name == "seed") c.seed = static_cast<unsigned long>(expect_int(key, v));
            else throw ConfigError("unknown key '" + key + "'");
        }
        else if (section == "study") {
            has_study = true;
            if (name == "kind") study.kind = expect<std::string>(key, v);
            else if (name == "values") study.values = expect<std::vector<double>>(key, v);
            else if (name == "orders") study.orders = expect<std::vector<double>>(key, v);
            else throw ConfigError("unknown key '" + key + "'");
        }
        else {
            throw ConfigError("unknown key '" + key + "' (sections: model, scenario, time, av, output, run, study)");
        }
    }
    if (has_study) {
        c.study = study;
    }
    return c;
}

RunConfig parse_config(const std::string& text)
{
    return config_from_table(parse_toml(text));
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunConfig& c)
{
    std::ostringstream out;
    out << "[model]\n";
    out << "kind = " << quote(c.model) << "\n";
    out << "variant = " << quote(c.variant) << "\n";
    out << "operator_mode = " << quote(c.operator_mode) << "\n";
    out << "order = " << c.order << "\n";
    out << "g = " << format_double(c.g) << "\n";
    if (c.lambda_set) {
        out << "lambda = " << format_double(c.lambda) << "\n";
    }
    out << "\n[scenario]\n";
    out << "name = " << quote(c.scenario) << "\n";
    for (const auto& [k, v] : c.scenario_params) {
        out << k << " = " << format_double(v) << "\n";
    }
    out << "\n[time]\n";
    if (!c.tableau.empty()) {
        out << "tableau = " << quote(c.tableau) << "\n";
    }
    out << "adaptive = " << (c.adaptive ? "true" : "false") << "\n";
    out << "dt = " << format_double(c.dt) << "\n";
    out << "abs_tol = " << format_double(c.abs_tol) << "\n";
    out << "rel_tol = " << format_double(c.rel_tol) << "\n";
    out << "relax = " << (c.relax ? "true" : "false") << "\n";
    out << "snapshot_times = " << array(c.snapshot_times) << "\n";
    out << "\n[av]\n";
    out << "enabled = " << (c.av.enabled ? "true" : "false") << "\n";
    out << "constant = " << format_double(c.av.c) << "\n";
    out << "\n[output]\n";
    out << "dir = " << quote(c.output_dir) << "\n";
    out << "write_files = " << (c.write_files ? "true" : "false") << "\n";
    out << "gauges = " << array(c.gauges) << "\n";
    if (!c.gauge_file.empty()) {
        out << "gauge_file = " << quote(c.gauge_file) << "\n";
    }
    if (!c.reference_file.empty()) {
        out << "reference_file = " << quote(c.reference_file) << "\n";
    }
    out << "\n[run]\n";
    out << "seed = " << c.seed << "\n";
    if (c.study) {
        out << "\n[study]\n";
        out << "kind = " << quote(c.study->kind) << "\n";
        out << "values = " << array(c.study->values) << "\n";
        if (!c.study->orders.empty()) {
            out << "orders = " << array(c.study->orders) << "\n";
        }
    }
    return out.str();
}

void validate(const RunConfig& c)
{
    ModelKind kind;
    Variant variant;
    OperatorMode mode;
    try {
        kind = parse_model_kind(c.model);
        variant = parse_variant(c.variant);
        mode = parse_operator_mode(c.operator_mode);
    }
    catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if ((variant == Variant::mild || variant == Variant::full) && kind != ModelKind::sgn_original) {
        throw ConfigError("variant '" + c.variant + "' is only available for model sgn-original");
    }
    if (variant == Variant::variable && kind == ModelKind::sgn_original) {
        throw ConfigError("sgn-original uses variant mild or full for variable bathymetry, not 'variable'");
    }
    if (c.lambda_set && kind != ModelKind::sgn_hyperbolic) {
        throw ConfigError("lambda only applies to model sgn-hyperbolic");
    }
    if (mode == OperatorMode::central && c.order != 2 && c.order != 4 && c.order != 6) {
        throw ConfigError("central operators exist for orders 2, 4 and 6, not " + std::to_string(c.order));
    }
    if (mode == OperatorMode::upwind && (c.order < 1 || c.order > 6)) {
        throw ConfigError("upwind operators exist for orders 1 to 6, not " + std::to_string(c.order));
    }
    if (!(c.g > 0.0)) {
        throw ConfigError("g must be positive");
    }
    if (!(c.lambda >= 0.0)) {
        throw ConfigError("lambda must be non-negative");
    }
    if (!(c.abs_tol > 0.0) || !(c.rel_tol > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (!c.adaptive && !(c.dt > 0.0)) {
        throw ConfigError("fixed-step runs need time.dt > 0");
    }
    if (c.dt < 0.0) {
        throw ConfigError("time.dt must be non-negative");
    }
    if (c.av.c < 0.0) {
        throw ConfigError("av.constant must be non-negative");
    }
    if (!c.tableau.empty() && c.tableau != "dp5" && c.tableau != "tsit5" && c.tableau != "bs3") {
        throw ConfigError("unknown tableau '" + c.tableau + "' (expected dp5, tsit5 or bs3)");
    }
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
        std::string list;
        for (const auto& n : names) {
            list += (list.empty() ? "" : ", ") + n;
        }
        throw ConfigError("unknown scenario '" + c.scenario + "' (valid: " + list + ")");
    }
    if (c.scenario == "manufactured" && (kind != ModelKind::sgn_hyperbolic || variant != Variant::variable)) {
        throw ConfigError("scenario manufactured requires model sgn-hyperbolic with variant variable");
    }
    if (c.study) {
        static const std::set<std::string> kinds{"grid-convergence", "lambda-convergence", "dt-conservation",
                                                 "froude-sweep", "error-growth"};
        if (!kinds.count(c.study->kind)) {
            throw ConfigError("unknown study kind '" + c.study->kind +
                              "' (valid: grid-convergence, lambda-convergence, dt-conservation, froude-sweep, "
                              "error-growth)");
        }
        if (c.study->values.empty() && c.study->kind != "error-growth") {
            throw ConfigError("study.values must list the sweep");
        }
    }
}

std::string resolved_tableau(const RunConfig& c)
{
    if (!c.tableau.empty()) {
        return c.tableau;
    }
    return c.model == "sgn-hyperbolic" ? "bs3" : "tsit5";
}

} // namespace sgn
