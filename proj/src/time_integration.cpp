#include "sgn/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "sgn/errors.hpp"

namespace sgn {

ButcherTableau dormand_prince54()
{
    ButcherTableau t;
    t.name = "dp5";
    t.stages = 7;
    t.a = {
        {},
        {1.0 / 5.0},
        {3.0 / 40.0, 9.0 / 40.0},
        {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
        {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
        {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
        {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
    };
    t.b = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0};
    t.bhat = {5179.0 / 57600.0, 0.0,          7571.0 / 16695.0, 393.0 / 640.0,
              -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
    t.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
    t.order = 5;
    t.embedded_order = 4;
    t.fsal = true;
    return t;
}

ButcherTableau tsitouras54()
{
    ButcherTableau t;
    t.name = "tsit5";
    t.stages = 7;
    t.a = {
        {},
        {0.161},
        {-0.008480655492356989, 0.335480655492357},
        {2.897153057105493, -6.359448489975075, 4.3622954328695815},
        {5.325864828439257, -11.748883564062828, 7.4955393428898365, -0.09249506636175525},
        {5.86145544294642, -12.92096931784711, 8.159367898576159, -0.071584973281401, -0.028269050394068383},
        {0.09646076681806523, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081,
         2.324710524099774},
    };
    t.b = {0.09646076681806523, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081,
           2.324710524099774, 0.0};
    // bhat = b - btilde
    const double btilde[] = {-0.00178001105222577714, -0.0008164344596567469, 0.007880878010261995,
                             -0.1447110071732629,     0.5823571654525552,     -0.45808210592918697,
                             1.0 / 66.0};
    t.bhat.resize(7);
    for (int i = 0; i < 7; ++i) {
        t.bhat[i] = t.b[i] - btilde[i];
    }
    t.c = {0.0, 0.161, 0.327, 0.9, 0.9800255409045097, 1.0, 1.0};
    t.order = 5;
    t.embedded_order = 4;
    t.fsal = true;
    return t;
}

ButcherTableau bogacki_shampine32()
{
    ButcherTableau t;
    t.name = "bs3";
    t.stages = 4;
    t.a = {
        {},
        {1.0 / 2.0},
        {0.0, 3.0 / 4.0},
        {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0},
    };
    t.b = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0};
    t.bhat = {7.0 / 24.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 8.0};
    t.c = {0.0, 1.0 / 2.0, 3.0 / 4.0, 1.0};
    t.order = 3;
    t.embedded_order = 2;
    t.fsal = true;
    return t;
}

ButcherTableau tableau_by_name(const std::string& name)
{
    if (name == "dp5") {
        return dormand_prince54();
    }
    if (name == "tsit5") {
        return tsitouras54();
    }
    if (name == "bs3") {
        return bogacki_shampine32();
    }
    throw InvalidArgument("unknown tableau '" + name + "' (expected dp5, tsit5 or bs3)");
}

namespace {

// Rooted trees as sorted child lists of indices into a shared list.
struct Tree {
    int order = 1;
    std::vector<std::size_t> children;
};

void extend_children(const std::vector<Tree>& trees, std::size_t first, int remaining,
                     std::vector<std::size_t>& current, std::vector<std::vector<std::size_t>>& out)
{
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = first; i < trees.size(); ++i) {
        if (trees[i].order <= remaining) {
            current.push_back(i);
            extend_children(trees, i, remaining - trees[i].order, current, out);
            current.pop_back();
        }
    }
}

std::vector<Tree> rooted_trees(int max_order)
{
    std::vector<Tree> trees{Tree{1, {}}};
    for (int n = 2; n <= max_order; ++n) {
        const std::vector<Tree> smaller = trees;
        std::vector<std::vector<std::size_t>> lists;
        std::vector<std::size_t> current;
        extend_children(smaller, 0, n - 1, current, lists);
        for (auto& l : lists) {
            trees.push_back(Tree{n, l});
        }
    }
    return trees;
}

} // namespace

double order_condition_residual(const ButcherTableau& t, int order, bool embedded)
{
    const std::size_t s = t.stages;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s, s);
    Eigen::VectorXd c(s);
    Eigen::VectorXd b(s);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < t.a[i].size(); ++j) {
            a(i, j) = t.a[i][j];
        }
        c[i] = t.c[i];
        b[i] = embedded ? t.bhat[i] : t.b[i];
    }
    double worst = (a.rowwise().sum() - c).cwiseAbs().maxCoeff();

    const std::vector<Tree> trees = rooted_trees(order);
    std::vector<Eigen::VectorXd> g(trees.size());
    std::vector<double> gamma(trees.size());
    for (std::size_t k = 0; k < trees.size(); ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(s);
        double gm = trees[k].order;
        for (std::size_t child : trees[k].children) {
            v = v.cwiseProduct(a * g[child]);
            gm *= gamma[child];
        }
        g[k] = v;
        gamma[k] = gm;
        worst = std::max(worst, std::abs(b.dot(v) - 1.0 / gm));
    }
    return worst;
}

double wrms_norm(const Vector& err, const Vector& y, const Vector& ynew, const StepControl& control)
{
    const Eigen::ArrayXd scale = control.abs_tol + control.rel_tol * y.array().abs().max(ynew.array().abs());
    return std::sqrt((err.array() / scale).square().mean());
}

ErkStepResult erk_step(const RhsFunction& f, const Vector& y, double t, double dt, const ButcherTableau& tab,
                       const StepControl& control, ErkWorkspace* ws)
{
    if (!(dt > 0.0)) {
        throw InvalidArgument("erk_step: dt must be positive");
    }
    ErkWorkspace local;
    ErkWorkspace& w = ws ? *ws : local;
    const std::size_t s = tab.stages;
    if (w.k.size() != s) {
        w.k.assign(s, Vector());
        w.first_valid = false;
    }
    if (!(tab.fsal && w.first_valid)) {
        f(t, y, w.k[0]);
    }
    for (std::size_t i = 1; i < s; ++i) {
        w.stage.setZero(y.size());
        for (std::size_t j = 0; j < i; ++j) {
            if (tab.a[i][j] != 0.0) {
                w.stage += (dt * tab.a[i][j]) * w.k[j];
            }
        }
        w.stage += y;
        f(t + tab.c[i] * dt, w.stage, w.k[i]);
    }
    ErkStepResult r;
    r.increment = Vector::Zero(y.size());
    Vector err = Vector::Zero(y.size());
    for (std::size_t i = 0; i < s; ++i) {
        if (tab.b[i] != 0.0) {
            r.increment += (dt * tab.b[i]) * w.k[i];
        }
        const double e = tab.b[i] - tab.bhat[i];
        if (e != 0.0) {
            err += (dt * e) * w.k[i];
        }
    }
    r.y = y + r.increment;
    r.error_norm = wrms_norm(err, y, r.y, control);
    return r;
}

ControllerDecision controller_update(double error_norm, double dt, ControllerState& history,
                                     const StepControl& control, int embedded_order)
{
    const double k = embedded_order + 1.0;
    const double beta1 = control.beta1 > 0.0 ? control.beta1 : 0.7 / k;
    const double beta2 = control.beta2 > 0.0 ? control.beta2 : 0.4 / k;
    ControllerDecision d;
    if (!std::isfinite(error_norm)) {
        d.accept = false;
        d.dt_next = dt * control.min_factor;
        return d;
    }
    if (error_norm <= 1.0) {
        d.accept = true;
        double factor = control.max_factor;
        if (error_norm > 0.0) {
            factor = control.safety * std::pow(error_norm, -beta1) * std::pow(history.err_prev, beta2);
            factor = std::clamp(factor, control.min_factor, control.max_factor);
        }
        history.err_prev = std::max(error_norm, 1e-4);
        d.dt_next = dt * factor;
        return d;
    }
    d.accept = false;
    const double factor = std::max(control.min_factor, control.safety * std::pow(error_norm, -1.0 / k));
    d.dt_next = dt * std::min(factor, control.safety);
    return d;
}

RelaxationResult relaxation_gamma(const Vector& y, const Vector& increment, const EnergyFunction& energy)
{
    RelaxationResult r;
    const double e0 = energy(y);
    const auto residual = [&](double gamma) {
        const Vector trial = y + gamma * increment;
        return energy(trial) - e0;
    };
    const double r1 = residual(1.0);
    if (r1 == 0.0) {
        r.gamma = 1.0;
        r.residual = r1;
        r.ok = true;
        return r;
    }
    const std::pair<double, double> brackets[] = {{0.5, 1.5}, {0.25, 2.0}};
    for (const auto& [lo, hi] : brackets) {
        const double flo = residual(lo);
        const double fhi = residual(hi);
        if (flo == 0.0 || fhi == 0.0) {
            r.gamma = flo == 0.0 ? lo : hi;
            r.residual = 0.0;
            r.ok = true;
            return r;
        }
        if ((flo < 0.0) == (fhi < 0.0)) {
            continue;
        }
        boost::uintmax_t max_iter = 100;
        const auto stop = [](double a, double b) {
            return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), 1.0);
        };
        const auto bracket = boost::math::tools::toms748_solve(residual, lo, hi, flo, fhi, stop, max_iter);
        const double ra = residual(bracket.first);
        const double rb = residual(bracket.second);
        r.gamma = std::abs(ra) <= std::abs(rb) ? bracket.first : bracket.second;
        r.residual = std::min(std::abs(ra), std::abs(rb));
        r.iterations = static_cast<int>(max_iter);
        r.ok = true;
        return r;
    }
    r.gamma = 1.0;
    r.residual = r1;
    r.ok = false;
    return r;
}

namespace {

double initial_step(const Problem& p, const IntegrateOptions& opts, std::size_t& evals)
{
    const StepControl& c = opts.control;
    Vector f0;
    p.rhs(p.t0, p.y0, f0);
    ++evals;
    const Eigen::ArrayXd scale = c.abs_tol + c.rel_tol * p.y0.array().abs();
    const double d0 = std::sqrt((p.y0.array() / scale).square().mean());
    const double d1 = std::sqrt((f0.array() / scale).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, p.t_end - p.t0);
    const Vector y1 = p.y0 + h0 * f0;
    Vector f1;
    p.rhs(p.t0 + h0, y1, f1);
    ++evals;
    const double d2 = std::sqrt(((f1 - f0).array() / scale).square().mean()) / h0;
    if (d1 == 0.0 && d2 == 0.0) {
        return p.t_end - p.t0;
    }
    const double q = opts.tableau.order + 1.0;
    double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / std::max(d1, d2), 1.0 / q);
    return std::min({100.0 * h0, h1, p.t_end - p.t0});
}

} // namespace

Trajectory integrate(const Problem& p, const IntegrateOptions& opts)
{
    if (!(p.t_end > p.t0)) {
        throw InvalidArgument("integrate: t_end must exceed t0");
    }
    if (opts.relax && !p.energy) {
        throw InvalidArgument("integrate: relaxation needs an energy function");
    }
    if (!opts.adaptive && !(opts.dt > 0.0)) {
        throw InvalidArgument("integrate: fixed-step mode needs dt > 0");
    }

    std::vector<double> stops;
    for (double s : opts.stop_times) {
        if (s > p.t0 && s < p.t_end) {
            stops.push_back(s);
        }
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(p.t_end);

    Trajectory tr;
    IntegrateStats& st = tr.stats;
    const ButcherTableau& tab = opts.tableau;
    std::size_t evals = 0;
    const RhsFunction counted = [&](double t, const Vector& y, Vector& dy) {
        ++evals;
        p.rhs(t, y, dy);
    };

    double dt = opts.dt > 0.0 ? opts.dt : initial_step(p, opts, evals);
    double t = p.t0;
    Vector y = p.y0;
    ErkWorkspace ws;
    ControllerState hist;
    std::size_t stop_idx = 0;
    int consecutive_rejections = 0;

    while (stop_idx < stops.size()) {
        const double target = stops[stop_idx];
        const double remaining = target - t;
        if (remaining <= 1e-13 * std::max(1.0, std::abs(target))) {
            t = target;
            ++stop_idx;
            continue;
        }
        if (st.accepted >= opts.max_steps) {
            throw NumericalFailure("integrate: step limit reached at t = " + std::to_string(t));
        }
        const bool landing = dt >= remaining * (1.0 - 1e-12);
        const double h = landing ? remaining : dt;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw NumericalFailure("integrate: step size underflow at t = " + std::to_string(t));
        }

        ErkStepResult res;
        bool failed = false;
        std::string failure;
        try {
            res = erk_step(counted, y, t, h, tab, opts.control, &ws);
            if (!std::isfinite(res.error_norm) || !res.y.allFinite()) {
                failed = true;
                failure = "non-finite state";
            }
        }
        catch (const StateError& e) {
            failed = true;
            failure = e.what();
        }
        if (failed) {
            ++st.rejected;
            if (++consecutive_rejections > opts.max_rejections) {
                throw NumericalFailure("integrate: too many rejected steps at t = " + std::to_string(t) + " (" +
                                       failure + ")");
            }
            dt = 0.5 * h;
            continue;
        }

        ControllerDecision decision{true, opts.dt};
        if (opts.adaptive) {
            decision = controller_update(res.error_norm, h, hist, opts.control, tab.embedded_order);
            if (!decision.accept) {
                ++st.rejected;
                if (++consecutive_rejections > opts.max_rejections) {
                    throw NumericalFailure("integrate: too many rejected steps at t = " + std::to_string(t));
                }
                dt = decision.dt_next;
                continue;
            }
        }
        consecutive_rejections = 0;

        double gamma = 1.0;
        bool relax_failed = false;
        if (opts.relax) {
            const Vector& inc = res.increment;
            if (inc.squaredNorm() > 0.0) {
                const RelaxationResult rr = relaxation_gamma(y, inc, p.energy);
                if (rr.ok) {
                    gamma = rr.gamma;
                    if (gamma != 1.0) {
                        res.y = y + gamma * inc;
                    }
                }
                else {
                    relax_failed = true;
                    ++st.relaxation_failures;
                }
            }
        }

        double t_new = landing ? target : t + gamma * h;
        bool reached = landing;
        if (t_new >= target) {
            t_new = target;
            reached = true;
        }
        if (tab.fsal && gamma == 1.0) {
            std::swap(ws.k.front(), ws.k.back());
            ws.first_valid = true;
        }
        else {
            ws.first_valid = false;
        }
        y = std::move(res.y);
        t = t_new;
        ++st.accepted;
        if (reached) {
            ++stop_idx;
        }
        if (opts.on_accept) {
            StepInfo info;
            info.step = st.accepted;
            info.t = t;
            info.dt = h;
            info.gamma = gamma;
            info.relaxation_failed = relax_failed;
            info.y = &y;
            opts.on_accept(info);
        }
        if (opts.adaptive) {
            dt = decision.dt_next;
        }
        else {
            dt = opts.dt;
        }
    }

    tr.y_final = std::move(y);
    tr.t_final = t;
    st.rhs_evaluations = evals;
    return tr;
}

} // namespace sgn
