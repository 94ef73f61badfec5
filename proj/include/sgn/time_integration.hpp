#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sgn {

using Vector = Eigen::VectorXd;

struct ButcherTableau {
    std::string name;
    std::size_t stages = 0;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> bhat;
    std::vector<double> c;
    int order = 0;
    int embedded_order = 0;
    bool fsal = false;
};

/// Dormand-Prince 5(4), 7 stages, first-same-as-last.
ButcherTableau dormand_prince54();
/// Bogacki-Shampine 3(2), 4 stages, first-same-as-last.
ButcherTableau tsitouras54();
ButcherTableau bogacki_shampine32();
ButcherTableau tableau_by_name(const std::string& name);

/// Largest |Phi(t) - 1/gamma(t)| over all rooted trees up to `order`, using weights b
/// (or bhat when `embedded`). Also folds in the row-sum condition.
double order_condition_residual(const ButcherTableau& t, int order, bool embedded = false);

struct StepControl {
    double abs_tol = 1e-5;
    double rel_tol = 1e-5;
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
    /// PI gains; 0 means "derive from the embedded order".
    double beta1 = 0.0;
    double beta2 = 0.0;
};

using RhsFunction = std::function<void(double t, const Vector& y, Vector& dy)>;

/// Stage storage reused across steps; holds the FSAL derivative.
struct ErkWorkspace {
    std::vector<Vector> k;
    Vector stage;
    bool first_valid = false;
};

struct ErkStepResult {
    Vector y;
    /// dt * sum b_i k_i; y = y0 + increment with a single rounding per entry.
    Vector increment;
    double error_norm = 0.0;
};

/// One explicit RK step. Throws whatever the RHS throws (e.g. StateError).
ErkStepResult erk_step(const RhsFunction& f, const Vector& y, double t, double dt, const ButcherTableau& tab,
                       const StepControl& control, ErkWorkspace* ws = nullptr);

/// sqrt(mean((e_i / (abs_tol + rel_tol max(|y_i|, |ynew_i|)))^2))
double wrms_norm(const Vector& err, const Vector& y, const Vector& ynew, const StepControl& control);

struct ControllerState {
    double err_prev = 1.0;
};

struct ControllerDecision {
    bool accept = false;
    double dt_next = 0.0;
};

ControllerDecision controller_update(double error_norm, double dt, ControllerState& history,
                                     const StepControl& control, int embedded_order);

struct RelaxationResult {
    double gamma = 1.0;
    double residual = 0.0;
    int iterations = 0;
    bool ok = false;
};

using EnergyFunction = std::function<double(const Vector&)>;

/// Solves E(y + gamma inc) = E(y) on [0.5, 1.5], widening once to [0.25, 2] before failing.
RelaxationResult relaxation_gamma(const Vector& y, const Vector& increment, const EnergyFunction& energy);

struct StepInfo {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    double gamma = 1.0;
    bool relaxation_failed = false;
    const Vector* y = nullptr;
};

struct IntegrateOptions {
    ButcherTableau tableau = tsitouras54();
    StepControl control;
    bool adaptive = true;
    /// Fixed step, or initial step for adaptive runs (0 picks one automatically).
    double dt = 0.0;
    bool relax = false;
    std::size_t max_steps = 10'000'000;
    int max_rejections = 50;
    /// Times the integrator must land on exactly (snapshots).
    std::vector<double> stop_times;
    std::function<void(const StepInfo&)> on_accept;
};

struct IntegrateStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t relaxation_failures = 0;
};

struct Trajectory {
    Vector y_final;
    double t_final = 0.0;
    IntegrateStats stats;
};

struct Problem {
    RhsFunction rhs;
    EnergyFunction energy;
    Vector y0;
    double t0 = 0.0;
    double t_end = 0.0;
};

Trajectory integrate(const Problem& problem, const IntegrateOptions& opts);

} // namespace sgn
