#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgn/model.hpp"
#include "sgn/sbp.hpp"

namespace sgn {

struct SolitonParams {
    double h_inf = 1.0;
    double amplitude = 0.2;
    double g = 9.81;
    double x0 = 0.0;

    double epsilon() const { return amplitude / h_inf; }
    double kappa() const;
    double speed() const;
};

struct FlowFields {
    Field h;
    Field u;
};

/// Classical solitary wave. With period > 0 the crest position is wrapped
/// periodically, so the profile can be compared after several transits.
FlowFields soliton_exact(const Field& x, double t, const SolitonParams& p, double period = 0.0);

struct RiemannParams {
    double h_left = 1.8;
    double h_right = 1.0;
    double alpha = 2.0;
    double x0 = 0.0;
    double g = 9.81;
};

struct RiemannPredictions {
    double h_star = 0.0;
    double u_star = 0.0;
    double delta0 = 0.0;
    double a_plus = 0.0;
    double crest = 0.0;
};

RiemannPredictions riemann_predictions(const RiemannParams& p);

struct FavreParams {
    double h0 = 1.0;
    double epsilon = 0.2;
    double alpha = 2.0;
    double x0 = 0.0;
    double u0 = 0.0;
    double g = 9.81;

    double h1() const { return (1.0 + epsilon) * h0; }
    double jump_h() const { return epsilon * h0; }
    double jump_u() const;
    double froude() const;
};

using ScenarioParams = std::map<std::string, double>;

struct Scenario {
    std::string name;
    std::string description;
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;
    double t_end = 0.0;
    std::function<Field(const Field& x)> bathymetry;
    std::function<FlowFields(const Field& x)> initial;
    /// Reference solution h, u at time t (empty if none).
    std::function<FlowFields(const Field& x, double t)> exact;
    /// Forcing for the four equations of the hyperbolic system with bathymetry.
    std::function<void(const Field& x, double t, std::vector<Field>& sources)> sources;
    std::vector<double> gauges;
    /// Resolved parameter values, including defaults.
    ScenarioParams params;
};

std::vector<std::string> scenario_names();

/// Builds a named scenario. Unknown names or parameter keys throw ConfigError.
Scenario make_scenario(const std::string& name, const ScenarioParams& overrides = {}, double g = 9.81);

Scenario soliton_scenario(const SolitonParams& p, double x_min = -50.0, double x_max = 50.0);
Scenario gaussian_ic(Variant kind);
Scenario riemann_ic(const RiemannParams& p);
Scenario favre_ic(const FavreParams& p, double x_min = -200.0, double x_max = 400.0);
Scenario dingemans_setup(double offset = 0.0);
Scenario manufactured(double g = 9.81);
Scenario lake_at_rest();
Scenario soliton_fission();

/// Dingemans bar: 0 -> 0.6 on [11.01, 23.04], plateau to 27.04, back to 0 at 33.07.
double dingemans_bathymetry(double x);

/// Gauge positions: one per line or CSV column "x"; '#' comments allowed.
std::vector<double> load_gauges(const std::string& path);

/// Closed-form manufactured forcing, exposed for verification.
struct ManufacturedSources {
    Field s_h;
    Field s_u;
    Field s_w;
    Field s_eta;
};
ManufacturedSources manufactured_sources(const Field& x, double t, double g);

} // namespace sgn
