#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "sgn/sbp.hpp"

namespace testing {

/// Smooth periodic field: mean + a few low Fourier modes with random amplitudes.
inline sgn::Field random_smooth(const sgn::PeriodicGrid& grid, std::mt19937_64& rng, double mean, double amp,
                                int modes = 3)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const sgn::Field x = grid.nodes();
    sgn::Field f = sgn::Field::Constant(x.size(), mean);
    for (int k = 1; k <= modes; ++k) {
        const double a = amp * unit(rng) / k;
        const double ph = phase(rng);
        f += a * (2.0 * std::numbers::pi * k * (x - grid.x_min) / grid.length() + ph).sin();
    }
    return f;
}

} // namespace testing


namespace testing {

using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Dense periodic circulant matrix, (1/dx) * sum_k c_k f_{i + first + k}.
inline Dense circulant(std::size_t n, int first, std::initializer_list<double> coeffs, double dx)
{
    Dense m = Dense::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const long nn = static_cast<long>(n);
    for (long i = 0; i < nn; ++i) {
        int k = 0;
        for (double c : coeffs) {
            const long j = ((i + first + k) % nn + nn) % nn;
            m(i, j) += c / dx;
            ++k;
        }
    }
    return m;
}

/// Dense matrix of an operator, column by column.
inline Dense dense_of(const sgn::DerivativeOperator& d)
{
    const Eigen::Index n = static_cast<Eigen::Index>(d.grid().n);
    Dense m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sgn::Field e = sgn::Field::Zero(n);
        e(j) = 1.0;
        m.col(j) = d.apply(e).matrix();
    }
    return m;
}

inline Dense diag(const Vec& v)
{
    return v.asDiagonal();
}

inline double max_abs(const Dense& m)
{
    return m.cwiseAbs().maxCoeff();
}

inline Vec vec(const sgn::Field& f)
{
    return f.matrix();
}

inline Vec prod(const Vec& a, const Vec& b)
{
    return a.cwiseProduct(b);
}

} // namespace testing
