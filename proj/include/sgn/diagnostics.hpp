#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgn/sbp.hpp"

namespace sgn {

double l2_error(const Field& f, const Field& ref, const MassMatrix& mass);

/// Pairwise -log(e2/e1)/log(n2/n1).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& sizes);

/// Least-squares slope of -log(e) against log(n) over all points.
double fitted_order(const std::vector<double>& errors, const std::vector<double>& sizes);

struct InvariantSeries {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> momentum;
    std::vector<double> energy;
    std::vector<double> gamma;
    std::vector<double> dt;

    void push(double t, double m, double p, double e, double g, double step);
    std::size_t size() const { return times.size(); }
};

struct Snapshot {
    double t = 0.0;
    Field values;
};

/// Linear interpolation of nodal values at x on a periodic grid.
double interpolate_periodic(const PeriodicGrid& grid, const Field& f, double x);

struct GaugeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// Interpolates each stored snapshot (e.g. of h + b) at x_gauge.
GaugeSeries gauge_series(const std::vector<Snapshot>& snapshots, const PeriodicGrid& grid, double x_gauge);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

struct LeadingWave {
    double peak = 0.0;
    double amplitude = 0.0;
    double position = 0.0;
};

/// Largest h above `threshold` inside the window, refined by a parabola through
/// the maximum and its neighbours. Empty if nothing exceeds the threshold.
std::optional<LeadingWave> leading_wave(const Field& x, const Field& h, Window window, double threshold,
                                        double baseline = 0.0);

double window_mean(const Field& x, const Field& f, Window window);

struct SolitonFit {
    double amplitude = 0.0;
    double center = 0.0;
    double baseline = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Least-squares fit of h_b (1 + (A/h_b) sech^2(kappa (x - x0))) to the points
/// above `threshold` in the window; h_b is the median of the other points there
/// and kappa follows from the solitary-wave relation.
SolitonFit soliton_fit(const Field& x, const Field& h, Window window, double threshold = 1.001,
                       double tolerance = 1e-10, int max_iterations = 500);

/// Soliton profile used by the fit.
Field soliton_profile(const Field& x, double amplitude, double center, double baseline);

/// Slope of log(error) vs log(t) after dropping the first 10% of samples.
double growth_exponent(const std::vector<double>& times, const std::vector<double>& errors);

/// Mean spacing of upward crossings of `level` inside the window (experimental).
std::optional<double> zero_crossing_wavelength(const Field& x, const Field& h, Window window, double level);

std::string format_double(double v);

void write_invariants_csv(const std::string& path, const InvariantSeries& s);
void write_snapshot_csv(const std::string& path, const Field& x, const Field& b,
                        const std::vector<std::pair<std::string, Field>>& fields);
void write_gauges_csv(const std::string& path, const std::vector<double>& gauge_x, const std::vector<double>& times,
                      const std::vector<std::vector<double>>& values);

} // namespace sgn
