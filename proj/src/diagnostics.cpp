#include "sgn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "sgn/errors.hpp"
#include "sgn/scenarios.hpp"

namespace sgn {

double l2_error(const Field& f, const Field& ref, const MassMatrix& mass)
{
    if (f.size() != ref.size() || f.size() != mass.weights.size()) {
        throw InvalidArgument("l2_error: length mismatch");
    }
    return std::sqrt((mass.weights * (f - ref).square()).sum());
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& sizes)
{
    if (errors.size() != sizes.size() || errors.size() < 2) {
        throw InvalidArgument("eoc: need matching lists of length >= 2");
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(sizes[i] > 0.0)) {
            throw InvalidArgument("eoc: errors and sizes must be positive");
        }
    }
    std::vector<double> out;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        out.push_back(-std::log(errors[i] / errors[i - 1]) / std::log(sizes[i] / sizes[i - 1]));
    }
    return out;
}

double fitted_order(const std::vector<double>& errors, const std::vector<double>& sizes)
{
    if (errors.size() != sizes.size() || errors.size() < 2) {
        throw InvalidArgument("fitted_order: need matching lists of length >= 2");
    }
    const double n = static_cast<double>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(sizes[i] > 0.0)) {
            throw InvalidArgument("fitted_order: errors and sizes must be positive");
        }
        const double lx = std::log(sizes[i]);
        const double ly = std::log(errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void InvariantSeries::push(double t, double m, double p, double e, double g, double step)
{
    times.push_back(t);
    mass.push_back(m);
    momentum.push_back(p);
    energy.push_back(e);
    gamma.push_back(g);
    dt.push_back(step);
}

double interpolate_periodic(const PeriodicGrid& grid, const Field& f, double x)
{
    if (x < grid.x_min || x > grid.x_max) {
        throw InvalidArgument("gauge position " + format_double(x) + " lies outside the domain");
    }
    const double s = (x - grid.x_min) / grid.dx;
    auto i = static_cast<std::size_t>(std::floor(s));
    double theta = s - static_cast<double>(i);
    if (i >= grid.n) {
        i = grid.n - 1;
        theta = s - static_cast<double>(i);
    }
    const std::size_t j = (i + 1) % grid.n;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    if (theta == 0.0) {
        return f[ii];
    }
    return (1.0 - theta) * f[ii] + theta * f[jj];
}

GaugeSeries gauge_series(const std::vector<Snapshot>& snapshots, const PeriodicGrid& grid, double x_gauge)
{
    GaugeSeries g;
    for (const Snapshot& s : snapshots) {
        g.times.push_back(s.t);
        g.values.push_back(interpolate_periodic(grid, s.values, x_gauge));
    }
    return g;
}

std::optional<LeadingWave> leading_wave(const Field& x, const Field& h, Window window, double threshold,
                                        double baseline)
{
    if (x.size() != h.size()) {
        throw InvalidArgument("leading_wave: length mismatch");
    }
    if (!(window.hi > window.lo) || window.lo > x[x.size() - 1] || window.hi < x[0]) {
        throw InvalidArgument("leading_wave: window outside the domain");
    }
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < window.lo || x[i] > window.hi || !(h[i] > threshold)) {
            continue;
        }
        if (best < 0 || h[i] > h[best]) {
            best = i;
        }
    }
    if (best < 0) {
        return std::nullopt;
    }
    LeadingWave w;
    w.peak = h[best];
    w.position = x[best];
    if (best > 0 && best + 1 < x.size()) {
        const double fm = h[best - 1];
        const double f0 = h[best];
        const double fp = h[best + 1];
        const double denom = fm - 2.0 * f0 + fp;
        if (denom < 0.0) {
            const double dx = x[best + 1] - x[best];
            const double s = 0.5 * (fm - fp) / denom;
            w.position = x[best] + s * dx;
            w.peak = f0 - 0.25 * (fm - fp) * s;
        }
    }
    w.amplitude = w.peak - baseline;
    return w;
}

double window_mean(const Field& x, const Field& f, Window window)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] >= window.lo && x[i] <= window.hi) {
            sum += f[i];
            ++count;
        }
    }
    if (count == 0) {
        throw InvalidArgument("window_mean: empty window");
    }
    return sum / static_cast<double>(count);
}

Field soliton_profile(const Field& x, double amplitude, double center, double baseline)
{
    SolitonParams p;
    p.h_inf = baseline;
    p.amplitude = std::max(amplitude, 0.0);
    const double kappa = p.amplitude > 0.0 ? p.kappa() : 0.0;
    return baseline + p.amplitude / ((kappa * (x - center)).cosh().square());
}

namespace {

struct FitData {
    Field x;
    Field h;
    double baseline;
};

double fit_objective(const gsl_vector* v, void* params)
{
    const auto* d = static_cast<const FitData*>(params);
    const double a = gsl_vector_get(v, 0);
    const double c = gsl_vector_get(v, 1);
    if (!(a > 0.0)) {
        return 1e300;
    }
    return (soliton_profile(d->x, a, c, d->baseline) - d->h).square().sum();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

SolitonFit soliton_fit(const Field& x, const Field& h, Window window, double threshold, double tolerance,
                       int max_iterations)
{
    std::vector<double> fx, fh, rest;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < window.lo || x[i] > window.hi) {
            continue;
        }
        if (h[i] > threshold) {
            fx.push_back(x[i]);
            fh.push_back(h[i]);
        }
        else {
            rest.push_back(h[i]);
        }
    }
    if (fx.size() < 3) {
        throw NumericalFailure("soliton_fit: fewer than three points above the threshold");
    }
    FitData data;
    data.x = Eigen::Map<const Field>(fx.data(), static_cast<Eigen::Index>(fx.size()));
    data.h = Eigen::Map<const Field>(fh.data(), static_cast<Eigen::Index>(fh.size()));
    data.baseline = rest.empty() ? threshold : median(rest);

    Eigen::Index imax = 0;
    data.h.maxCoeff(&imax);
    const double a0 = std::max(data.h[imax] - data.baseline, 1e-6);
    const double c0 = data.x[imax];

    gsl_multimin_function fn;
    fn.n = 2;
    fn.f = fit_objective;
    fn.params = &data;

    gsl_vector* start = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    gsl_vector_set(start, 0, a0);
    gsl_vector_set(start, 1, c0);
    gsl_vector_set(step, 0, 0.1 * a0);
    gsl_vector_set(step, 1, 0.5);

    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(s, &fn, start, step);

    SolitonFit fit;
    fit.baseline = data.baseline;
    int status = GSL_CONTINUE;
    int iter = 0;
    while (status == GSL_CONTINUE && iter < max_iterations) {
        ++iter;
        if (gsl_multimin_fminimizer_iterate(s)) {
            break;
        }
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), tolerance);
    }
    fit.amplitude = gsl_vector_get(s->x, 0);
    fit.center = gsl_vector_get(s->x, 1);
    fit.iterations = iter;
    fit.converged = status == GSL_SUCCESS;
    fit.residual = (soliton_profile(data.x, fit.amplitude, fit.center, fit.baseline) - data.h).abs().maxCoeff();

    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(start);
    gsl_vector_free(step);
    return fit;
}

double growth_exponent(const std::vector<double>& times, const std::vector<double>& errors)
{
    if (times.size() != errors.size() || times.size() < 5) {
        throw InvalidArgument("growth_exponent: need at least five samples");
    }
    const std::size_t skip = times.size() / 10;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (std::size_t i = skip; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !(errors[i] > 0.0)) {
            throw InvalidArgument("growth_exponent: samples must be positive");
        }
        const double lx = std::log(times[i]);
        const double ly = std::log(errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n += 1.0;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        throw InvalidArgument("growth_exponent: degenerate time samples");
    }
    return (n * sxy - sx * sy) / denom;
}

std::optional<double> zero_crossing_wavelength(const Field& x, const Field& h, Window window, double level)
{
    std::vector<double> crossings;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        if (x[i] < window.lo || x[i + 1] > window.hi) {
            continue;
        }
        const double a = h[i] - level;
        const double b = h[i + 1] - level;
        if (a < 0.0 && b >= 0.0) {
            crossings.push_back(x[i] + (x[i + 1] - x[i]) * a / (a - b));
        }
    }
    if (crossings.size() < 2) {
        return std::nullopt;
    }
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_csv(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    return out;
}

} // namespace

void write_invariants_csv(const std::string& path, const InvariantSeries& s)
{
    std::ofstream out = open_csv(path);
    out << "t,mass,momentum,energy,gamma,dt\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_double(s.times[i]) << ',' << format_double(s.mass[i]) << ',' << format_double(s.momentum[i])
            << ',' << format_double(s.energy[i]) << ',' << format_double(s.gamma[i]) << ','
            << format_double(s.dt[i]) << '\n';
    }
}

void write_snapshot_csv(const std::string& path, const Field& x, const Field& b,
                        const std::vector<std::pair<std::string, Field>>& fields)
{
    std::ofstream out = open_csv(path);
    out << "x,b";
    for (const auto& f : fields) {
        out << ',' << f.first;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out << format_double(x[i]) << ',' << format_double(b[i]);
        for (const auto& f : fields) {
            out << ',' << format_double(f.second[i]);
        }
        out << '\n';
    }
}

void write_gauges_csv(const std::string& path, const std::vector<double>& gauge_x, const std::vector<double>& times,
                      const std::vector<std::vector<double>>& values)
{
    std::ofstream out = open_csv(path);
    out << 't';
    for (std::size_t k = 0; k < gauge_x.size(); ++k) {
        out << ",gauge" << k + 1 << '@' << format_double(gauge_x[k]);
    }
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]);
        for (std::size_t k = 0; k < gauge_x.size(); ++k) {
            out << ',' << format_double(values[k][i]);
        }
        out << '\n';
    }
}

} // namespace sgn
