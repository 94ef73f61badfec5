#include "sgn/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sgn/errors.hpp"

namespace sgn {

namespace {

constexpr double pi = std::numbers::pi;

Field sech2(const Field& z)
{
    return 1.0 / z.cosh().square();
}

Field smoothed_step(const Field& x, double x0, double alpha)
{
    return 0.5 * (1.0 - ((x - x0) / alpha).tanh());
}

double get(const ScenarioParams& p, const std::string& key)
{
    return p.at(key);
}

// Merges overrides into defaults, rejecting unknown keys.
ScenarioParams merge(const std::string& name, ScenarioParams defaults, const ScenarioParams& overrides)
{
    for (const auto& [k, v] : overrides) {
        auto it = defaults.find(k);
        if (it == defaults.end()) {
            std::string keys;
            for (const auto& d : defaults) {
                keys += (keys.empty() ? "" : ", ") + d.first;
            }
            throw ConfigError("scenario '" + name + "' has no parameter '" + k + "' (valid: " + keys + ")");
        }
        it->second = v;
    }
    return defaults;
}

void apply_grid(Scenario& s)
{
    s.x_min = get(s.params, "x_min");
    s.x_max = get(s.params, "x_max");
    const double n = get(s.params, "n");
    if (!(n >= 8.0) || n != std::floor(n)) {
        throw ConfigError("scenario '" + s.name + "': n must be an integer >= 8");
    }
    s.n = static_cast<std::size_t>(n);
    s.t_end = get(s.params, "t_end");
    if (!(s.x_max > s.x_min)) {
        throw ConfigError("scenario '" + s.name + "': x_max must exceed x_min");
    }
    if (!(s.t_end > 0.0)) {
        throw ConfigError("scenario '" + s.name + "': t_end must be positive");
    }
}

Field zero_bathymetry(const Field& x)
{
    return Field::Zero(x.size());
}

Field cosine_bathymetry(const Field& x)
{
    return (pi * x / 75.0).cos() / 4.0;
}

} // namespace

double SolitonParams::kappa() const
{
    const double e = epsilon();
    return std::sqrt(3.0 * e / (4.0 * h_inf * h_inf * (1.0 + e)));
}

double SolitonParams::speed() const
{
    return std::sqrt(g * h_inf * (1.0 + epsilon()));
}

FlowFields soliton_exact(const Field& x, double t, const SolitonParams& p, double period)
{
    const double c = p.speed();
    Field xi = x - p.x0 - c * t;
    if (period > 0.0) {
        xi = xi - period * (xi / period).round();
    }
    FlowFields f;
    f.h = p.h_inf * (1.0 + p.epsilon() * sech2(p.kappa() * xi));
    f.u = c * (1.0 - p.h_inf / f.h);
    return f;
}

RiemannPredictions riemann_predictions(const RiemannParams& p)
{
    if (!(p.h_left > 0.0 && p.h_right > 0.0)) {
        throw InvalidArgument("riemann_predictions: heights must be positive");
    }
    RiemannPredictions r;
    const double s = std::sqrt(p.h_left) + std::sqrt(p.h_right);
    r.h_star = s * s / 4.0;
    r.u_star = 2.0 * (std::sqrt(p.g * r.h_star) - std::sqrt(p.g * p.h_right));
    r.delta0 = std::abs(p.h_right - p.h_left);
    r.a_plus = r.delta0 - r.delta0 * r.delta0 / 12.0;
    r.crest = p.h_right + r.a_plus;
    return r;
}

double FavreParams::jump_u() const
{
    const double h1v = h1();
    return std::sqrt(g * (h1v + h0) / (2.0 * h0 * h1v)) * jump_h();
}

double FavreParams::froude() const
{
    return std::sqrt((1.0 + epsilon) * (1.0 + epsilon / 2.0));
}

std::vector<std::string> scenario_names()
{
    return {"soliton",   "gaussian_flat", "gaussian_variable", "lake_at_rest", "riemann",
            "favre",     "dingemans",     "manufactured",      "soliton_fission"};
}

Scenario soliton_scenario(const SolitonParams& p, double x_min, double x_max)
{
    if (!(p.h_inf > 0.0 && p.amplitude > 0.0)) {
        throw InvalidArgument("soliton: h_inf and amplitude must be positive");
    }
    Scenario s;
    s.name = "soliton";
    s.description = "classical solitary wave on a periodic domain";
    const double period = x_max - x_min;
    s.params = {{"h_inf", p.h_inf},   {"amplitude", p.amplitude}, {"x0", p.x0},   {"x_min", x_min},
                {"x_max", x_max},     {"n", 256.0},               {"t_end", period / p.speed()}};
    apply_grid(s);
    s.bathymetry = zero_bathymetry;
    s.initial = [p, period](const Field& x) { return soliton_exact(x, 0.0, p, period); };
    s.exact = [p, period](const Field& x, double t) { return soliton_exact(x, t, p, period); };
    return s;
}

Scenario gaussian_ic(Variant kind)
{
    Scenario s;
    const bool variable = kind != Variant::flat;
    s.name = variable ? "gaussian_variable" : "gaussian_flat";
    s.description = variable ? "Gaussian hump over a cosine bottom" : "Gaussian hump over a flat bottom";
    s.params = {{"x_min", -150.0}, {"x_max", 150.0}, {"n", 1000.0}, {"t_end", 35.0}, {"u0", 0.01}};
    apply_grid(s);
    s.bathymetry = variable ? cosine_bathymetry : zero_bathymetry;
    const double u0 = 0.01;
    s.initial = [variable, u0](const Field& x) {
        FlowFields f;
        f.h = 1.0 + (-x.square()).exp();
        if (variable) {
            f.h -= cosine_bathymetry(x);
        }
        f.u = Field::Constant(x.size(), u0);
        return f;
    };
    return s;
}

Scenario lake_at_rest()
{
    Scenario s;
    s.name = "lake_at_rest";
    s.description = "still water over a cosine bottom";
    s.params = {{"x_min", -150.0}, {"x_max", 150.0}, {"n", 1000.0}, {"t_end", 35.0}};
    apply_grid(s);
    s.bathymetry = cosine_bathymetry;
    s.initial = [](const Field& x) {
        return FlowFields{1.0 - cosine_bathymetry(x), Field::Zero(x.size())};
    };
    return s;
}

Scenario riemann_ic(const RiemannParams& p)
{
    if (!(p.h_left > 0.0 && p.h_right > 0.0 && p.alpha > 0.0)) {
        throw InvalidArgument("riemann: heights and alpha must be positive");
    }
    Scenario s;
    s.name = "riemann";
    s.description = "smoothed dam break producing a rarefaction and a dispersive shock";
    s.params = {{"h_left", p.h_left}, {"h_right", p.h_right}, {"alpha", p.alpha},  {"x0", p.x0},
                {"x_min", -600.0},    {"x_max", 600.0},       {"n", 4000.0},       {"t_end", 47.434}};
    apply_grid(s);
    s.bathymetry = zero_bathymetry;
    s.initial = [p](const Field& x) {
        return FlowFields{p.h_right + (p.h_left - p.h_right) * smoothed_step(x, p.x0, p.alpha),
                          Field::Zero(x.size())};
    };
    return s;
}

Scenario favre_ic(const FavreParams& p, double x_min, double x_max)
{
    if (!(p.epsilon > 0.0 && p.epsilon <= 0.5)) {
        throw InvalidArgument("favre: epsilon must lie in (0, 0.5]");
    }
    if (!(p.h0 > 0.0 && p.alpha > 0.0)) {
        throw InvalidArgument("favre: h0 and alpha must be positive");
    }
    Scenario s;
    s.name = "favre";
    s.description = "undular bore from a smoothed Rankine-Hugoniot jump";
    s.params = {{"h0", p.h0},       {"epsilon", p.epsilon}, {"alpha", p.alpha}, {"x0", p.x0},
                {"u0", p.u0},       {"x_min", x_min},       {"x_max", x_max},   {"n", (x_max - x_min) / 0.125},
                {"t_end", 60.0}};
    apply_grid(s);
    s.bathymetry = zero_bathymetry;
    s.initial = [p](const Field& x) {
        const Field step = smoothed_step(x, p.x0, p.alpha);
        return FlowFields{p.h0 + p.jump_h() * step, p.u0 + p.jump_u() * step};
    };
    return s;
}

double dingemans_bathymetry(double x)
{
    if (x <= 11.01 || x >= 33.07) {
        return 0.0;
    }
    if (x < 23.04) {
        return 0.6 * (x - 11.01) / (23.04 - 11.01);
    }
    if (x <= 27.04) {
        return 0.6;
    }
    return 0.6 * (33.07 - x) / (33.07 - 27.04);
}

Scenario dingemans_setup(double offset)
{
    constexpr double g = 9.81;
    constexpr double depth = 0.8;
    constexpr double amplitude = 0.02;
    constexpr double period = 2.86;
    const double omega = 2.0 * pi / period;
    // Wavenumber from omega^2 = g k tanh(k depth).
    double k = omega / std::sqrt(g * depth);
    for (int it = 0; it < 50; ++it) {
        const double th = std::tanh(k * depth);
        const double f = g * k * th - omega * omega;
        const double df = g * th + g * k * depth * (1.0 - th * th);
        k -= f / df;
    }
    const double wavelength = 2.0 * pi / k;
    const double celerity = omega / k;
    const std::vector<double> gauges{3.04, 9.44, 20.04, 26.04, 30.44, 37.04};
    // Leading crest placed so that it reaches the first gauge after 25 s.
    const double crest = gauges.front() - 25.0 * celerity + offset;
    const double start = crest - 9.75 * wavelength;
    const double stop = crest + 0.25 * wavelength;

    Scenario s;
    s.name = "dingemans";
    s.description = "periodic wave train over a submerged trapezoidal bar";
    s.params = {{"x_min", -140.0}, {"x_max", 100.0}, {"n", 1000.0},           {"t_end", 70.0},
                {"offset", offset}, {"crest", crest}, {"wavenumber", k},      {"amplitude", amplitude}};
    apply_grid(s);
    s.gauges = gauges;
    s.bathymetry = [](const Field& x) { return x.unaryExpr([](double v) { return dingemans_bathymetry(v); }); };
    s.initial = [=](const Field& x) {
        const Field b = x.unaryExpr([](double v) { return dingemans_bathymetry(v); });
        Field eta = Field::Zero(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] >= start && x[i] <= stop) {
                eta[i] = amplitude * std::cos(k * (x[i] - crest));
            }
        }
        const double mean = eta.mean();
        FlowFields f;
        f.h = depth + eta - b;
        f.u = std::sqrt(g / depth) * (eta - mean);
        return f;
    };
    return s;
}

ManufacturedSources manufactured_sources(const Field& x, double t, double g)
{
    const double tp = 2.0 * pi;
    const Field a = tp * x;
    const Field th = tp * x - 4.0 * pi * t;
    const Field tu = tp * x - pi * t;

    const Field h = 7.0 + 2.0 * a.cos() + th.cos();
    const Field h_t = 4.0 * pi * th.sin();
    const Field h_x = -4.0 * pi * a.sin() - tp * th.sin();
    const Field u = tu.sin();
    const Field u_t = -pi * tu.cos();
    const Field u_x = tp * tu.cos();
    const Field u_xx = -tp * tp * tu.sin();
    const Field u_xt = 2.0 * pi * pi * tu.sin();
    const Field b_x = 4.0 * pi * a.sin();
    const Field w = -h * u_x;
    const Field w_t = -h_t * u_x - h * u_xt;
    const Field w_x = -h_x * u_x - h * u_xx;

    ManufacturedSources s;
    s.s_h = h_t + h_x * u + h * u_x;
    s.s_u = h * u_t + g * h * (h_x + b_x) + h * u * u_x;
    s.s_w = h * w_t + h * u * w_x;
    s.s_eta = h_t + u * h_x + 1.5 * b_x * u - w;
    return s;
}

Scenario manufactured(double g)
{
    Scenario s;
    s.name = "manufactured";
    s.description = "manufactured solution for the hyperbolic system with bathymetry";
    s.params = {{"x_min", 0.0}, {"x_max", 1.0}, {"n", 64.0}, {"t_end", 1.0}};
    apply_grid(s);
    s.bathymetry = [](const Field& x) { return Field(-5.0 - 2.0 * (2.0 * pi * x).cos()); };
    s.exact = [](const Field& x, double t) {
        FlowFields f;
        f.h = 7.0 + 2.0 * (2.0 * pi * x).cos() + (2.0 * pi * x - 4.0 * pi * t).cos();
        f.u = (2.0 * pi * x - pi * t).sin();
        return f;
    };
    s.initial = [ex = s.exact](const Field& x) { return ex(x, 0.0); };
    s.sources = [g](const Field& x, double t, std::vector<Field>& out) {
        ManufacturedSources m = manufactured_sources(x, t, g);
        out.resize(4);
        out[0] = std::move(m.s_h);
        out[1] = std::move(m.s_u);
        out[2] = std::move(m.s_w);
        out[3] = std::move(m.s_eta);
    };
    return s;
}

Scenario soliton_fission()
{
    Scenario s;
    s.name = "soliton_fission";
    s.description = "rectangular hump decaying into a train of solitary waves";
    s.params = {{"x_min", -500.0}, {"x_max", 500.0}, {"n", 1000.0}, {"t_end", 118.0}};
    apply_grid(s);
    s.bathymetry = zero_bathymetry;
    s.initial = [](const Field& x) {
        FlowFields f;
        f.h = (x.abs() < 1.0).select(Field::Constant(x.size(), 1.8), Field::Constant(x.size(), 1.0));
        f.u = Field::Zero(x.size());
        return f;
    };
    return s;
}

Scenario make_scenario(const std::string& name, const ScenarioParams& overrides, double g)
{
    const auto finish = [&](Scenario s) {
        s.params = merge(name, s.params, overrides);
        apply_grid(s);
        return s;
    };
    if (name == "soliton") {
        ScenarioParams d = merge(name, soliton_scenario(SolitonParams{}).params, overrides);
        SolitonParams p{d["h_inf"], d["amplitude"], g, d["x0"]};
        Scenario s = soliton_scenario(p, d["x_min"], d["x_max"]);
        if (!overrides.count("t_end")) {
            d["t_end"] = s.params["t_end"];
        }
        s.params = d;
        apply_grid(s);
        return s;
    }
    if (name == "gaussian_flat" || name == "gaussian_variable") {
        ScenarioParams d = merge(name, gaussian_ic(Variant::flat).params, overrides);
        Scenario s = gaussian_ic(name == "gaussian_flat" ? Variant::flat : Variant::variable);
        const double u0 = d["u0"];
        const bool variable = name == "gaussian_variable";
        s.initial = [variable, u0](const Field& x) {
            FlowFields f;
            f.h = 1.0 + (-x.square()).exp();
            if (variable) {
                f.h -= cosine_bathymetry(x);
            }
            f.u = Field::Constant(x.size(), u0);
            return f;
        };
        s.params = d;
        apply_grid(s);
        return s;
    }
    if (name == "lake_at_rest") {
        return finish(lake_at_rest());
    }
    if (name == "riemann") {
        ScenarioParams d = merge(name, riemann_ic(RiemannParams{}).params, overrides);
        Scenario s = riemann_ic(RiemannParams{d["h_left"], d["h_right"], d["alpha"], d["x0"], g});
        s.params = d;
        apply_grid(s);
        return s;
    }
    if (name == "favre") {
        ScenarioParams d = merge(name, favre_ic(FavreParams{}).params, overrides);
        if (!overrides.count("n")) {
            d["n"] = std::round((d["x_max"] - d["x_min"]) / 0.125);
        }
        Scenario s = favre_ic(FavreParams{d["h0"], d["epsilon"], d["alpha"], d["x0"], d["u0"], g}, d["x_min"],
                              d["x_max"]);
        s.params = d;
        apply_grid(s);
        return s;
    }
    if (name == "dingemans") {
        ScenarioParams d = dingemans_setup().params;
        d.erase("crest");
        d.erase("wavenumber");
        d.erase("amplitude");
        d = merge(name, d, overrides);
        Scenario s = dingemans_setup(d["offset"]);
        for (const auto& [k, v] : d) {
            s.params[k] = v;
        }
        apply_grid(s);
        return s;
    }
    if (name == "manufactured") {
        return finish(manufactured(g));
    }
    if (name == "soliton_fission") {
        return finish(soliton_fission());
    }
    std::string names;
    for (const auto& n : scenario_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    throw ConfigError("unknown scenario '" + name + "' (valid: " + names + ")");
}

std::vector<double> load_gauges(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open gauge file '" + path + "'");
    }
    std::vector<double> xs;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double v = 0.0;
        if (ss >> v) {
            xs.push_back(v);
        }
    }
    return xs;
}

} // namespace sgn
