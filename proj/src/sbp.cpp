#include "sgn/sbp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sgn/errors.hpp"

namespace sgn {

Field PeriodicGrid::nodes() const
{
    Field x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        x[static_cast<Eigen::Index>(i)] = node(i);
    }
    return x;
}

PeriodicGrid make_grid(double x_min, double x_max, std::size_t n)
{
    if (!(x_max > x_min)) {
        throw InvalidArgument("make_grid: x_max must exceed x_min");
    }
    if (n < 4) {
        throw InvalidArgument("make_grid: need at least 4 nodes, got " + std::to_string(n));
    }
    PeriodicGrid grid;
    grid.x_min = x_min;
    grid.x_max = x_max;
    grid.n = n;
    grid.dx = (x_max - x_min) / static_cast<double>(n);
    return grid;
}

std::string to_string(StencilKind kind)
{
    switch (kind) {
    case StencilKind::central: return "central";
    case StencilKind::upwind_plus: return "upwind_plus";
    case StencilKind::upwind_minus: return "upwind_minus";
    }
    return "unknown";
}

std::string to_string(OperatorMode mode)
{
    return mode == OperatorMode::central ? "central" : "upwind";
}

OperatorMode parse_operator_mode(const std::string& s)
{
    if (s == "central") {
        return OperatorMode::central;
    }
    if (s == "upwind") {
        return OperatorMode::upwind;
    }
    throw InvalidArgument("unknown operator mode '" + s + "' (expected central or upwind)");
}

std::vector<double> first_derivative_weights(std::span<const int> offsets)
{
    // Fornberg (1988), specialised to derivative orders 0 and 1 at z = 0.
    const std::size_t m = offsets.size();
    std::vector<std::array<double, 2>> c(m, {0.0, 0.0});
    double c1 = 1.0;
    double c4 = offsets[0];
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        const int mn = static_cast<int>(std::min<std::size_t>(i, 1));
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = static_cast<double>(offsets[i] - offsets[j]);
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = c[i][1];
    }
    return w;
}

DerivativeOperator::DerivativeOperator(StencilKind kind, int order, int first_offset,
                                       std::vector<double> unit_coefficients, PeriodicGrid grid)
    : kind_(kind), order_(order), first_offset_(first_offset),
      coeffs_(std::move(unit_coefficients)), grid_(grid)
{
    if (coeffs_.empty()) {
        throw InvalidArgument("DerivativeOperator: empty stencil");
    }
    if (grid_.n <= coeffs_.size()) {
        throw InvalidArgument("DerivativeOperator: grid with " + std::to_string(grid_.n) +
                              " nodes is too small for a stencil of width " +
                              std::to_string(coeffs_.size()));
    }
}

double DerivativeOperator::unit_coefficient(int offset) const
{
    if (offset < first_offset() || offset > last_offset()) {
        return 0.0;
    }
    return coeffs_[static_cast<std::size_t>(offset - first_offset_)];
}

void DerivativeOperator::apply(std::span<const double> f, std::span<double> out) const
{
    const std::size_t n = grid_.n;
    if (f.size() != n || out.size() != n) {
        throw InvalidArgument("DerivativeOperator::apply: field length " + std::to_string(f.size()) +
                              " does not match grid size " + std::to_string(n));
    }
    const double inv_dx = 1.0 / grid_.dx;
    const int lo = first_offset();
    const int hi = last_offset();
    const auto ni = static_cast<long>(n);
    const std::size_t w = coeffs_.size();

    // Interior nodes whose stencil does not wrap.
    const long i_begin = std::max<long>(0, -lo);
    const long i_end = std::min<long>(ni, ni - hi);
    for (long i = i_begin; i < i_end; ++i) {
        const double* fp = f.data() + i + lo;
        double acc = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            acc += coeffs_[k] * fp[k];
        }
        out[static_cast<std::size_t>(i)] = acc * inv_dx;
    }
    auto wrapped = [&](long i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            long j = (i + lo + static_cast<long>(k)) % ni;
            if (j < 0) {
                j += ni;
            }
            acc += coeffs_[k] * f[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc * inv_dx;
    };
    for (long i = 0; i < std::min(i_begin, ni); ++i) {
        wrapped(i);
    }
    for (long i = std::max(i_end, i_begin); i < ni; ++i) {
        wrapped(i);
    }
}

Field DerivativeOperator::apply(const Field& f) const
{
    Field out(f.size());
    apply(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
          std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

std::vector<Triplet> DerivativeOperator::triplets() const
{
    std::vector<Triplet> out;
    const auto n = static_cast<long>(grid_.n);
    out.reserve(grid_.n * coeffs_.size());
    for (long i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (coeffs_[k] == 0.0) {
                continue;
            }
            long j = (i + first_offset_ + static_cast<long>(k)) % n;
            if (j < 0) {
                j += n;
            }
            out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                           coeffs_[k] / grid_.dx});
        }
    }
    return out;
}

Eigen::SparseMatrix<double> DerivativeOperator::sparse() const
{
    std::vector<Eigen::Triplet<double>> t;
    for (const auto& e : triplets()) {
        t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    const auto n = static_cast<int>(grid_.n);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Field apply(const DerivativeOperator& op, const Field& f)
{
    return op.apply(f);
}

Eigen::SparseMatrix<double> MassMatrix::sparse() const
{
    const auto n = static_cast<int>(weights.size());
    Eigen::SparseMatrix<double> m(n, n);
    m.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) {
        m.insert(i, i) = weights[i];
    }
    m.makeCompressed();
    return m;
}

MassMatrix uniform_mass(const PeriodicGrid& grid)
{
    return MassMatrix{Field::Constant(static_cast<Eigen::Index>(grid.n), grid.dx), grid};
}

double quadrature(const MassMatrix& mass, const Field& f)
{
    if (f.size() != mass.weights.size()) {
        throw InvalidArgument("quadrature: field length " + std::to_string(f.size()) +
                              " does not match mass matrix size " +
                              std::to_string(mass.weights.size()));
    }
    // Neumaier summation: invariants are compared at the 1e-13 level.
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double v = mass.weights[i] * f[i];
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

namespace {

std::vector<int> offset_range(int first, int last)
{
    std::vector<int> offsets(static_cast<std::size_t>(last - first + 1));
    std::iota(offsets.begin(), offsets.end(), first);
    return offsets;
}

} // namespace

CentralOperator build_central(const PeriodicGrid& grid, int order)
{
    if (order != 2 && order != 4 && order != 6) {
        throw InvalidArgument("build_central: unsupported order " + std::to_string(order) +
                              " (expected 2, 4 or 6)");
    }
    const int half = order / 2;
    const auto offsets = offset_range(-half, half);
    auto w = first_derivative_weights(offsets);
    // Enforce exact antisymmetry so that M D + D^T M vanishes bit-for-bit.
    for (int k = 1; k <= half; ++k) {
        const double a = 0.5 * (w[static_cast<std::size_t>(half + k)] -
                                w[static_cast<std::size_t>(half - k)]);
        w[static_cast<std::size_t>(half + k)] = a;
        w[static_cast<std::size_t>(half - k)] = -a;
    }
    w[static_cast<std::size_t>(half)] = 0.0;
    return CentralOperator{DerivativeOperator(StencilKind::central, order, -half, std::move(w), grid),
                           uniform_mass(grid)};
}

UpwindOperators build_upwind_pair(const PeriodicGrid& grid, int order)
{
    if (order < 1 || order > 6) {
        throw InvalidArgument("build_upwind_pair: unsupported order " + std::to_string(order) +
                              " (expected 1..6)");
    }
    // p+1 consecutive offsets, shifted one node downwind of centred.
    const int first = -((order - 1) / 2);
    const int last = first + order;
    const auto offsets = offset_range(first, last);
    auto w_plus = first_derivative_weights(offsets);

    std::vector<double> w_minus(w_plus.size());
    for (std::size_t k = 0; k < w_plus.size(); ++k) {
        w_minus[w_plus.size() - 1 - k] = -w_plus[k];
    }
    DerivativeOperator plus(StencilKind::upwind_plus, order, first, std::move(w_plus), grid);
    DerivativeOperator minus(StencilKind::upwind_minus, order, -last, std::move(w_minus), grid);
    return UpwindOperators{std::move(plus), std::move(minus), uniform_mass(grid)};
}

const DerivativeOperator& OperatorSet::plus() const
{
    if (!d_plus) {
        throw InvalidArgument("OperatorSet: no upwind operators available");
    }
    return *d_plus;
}

const DerivativeOperator& OperatorSet::minus() const
{
    if (!d_minus) {
        throw InvalidArgument("OperatorSet: no upwind operators available");
    }
    return *d_minus;
}

OperatorSet central_operator_set(const PeriodicGrid& grid, int order)
{
    auto c = build_central(grid, order);
    return OperatorSet{grid, std::move(c.mass), std::move(c.d), std::nullopt, std::nullopt, order};
}

OperatorSet upwind_operator_set(const PeriodicGrid& grid, int order)
{
    auto up = build_upwind_pair(grid, order);
    const int first = std::min(up.plus.first_offset(), up.minus.first_offset());
    const int last = std::max(up.plus.last_offset(), up.minus.last_offset());
    std::vector<double> avg;
    for (int k = first; k <= last; ++k) {
        avg.push_back(0.5 * (up.plus.unit_coefficient(k) + up.minus.unit_coefficient(k)));
    }
    DerivativeOperator central(StencilKind::central, order, first, std::move(avg), grid);
    return OperatorSet{grid, std::move(up.mass), std::move(central), std::move(up.plus),
                       std::move(up.minus), order};
}

namespace {

double max_abs(const Eigen::SparseMatrix<double>& m)
{
    double r = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            r = std::max(r, std::abs(it.value()));
        }
    }
    return r;
}

} // namespace

SbpResiduals sbp_residuals(const OperatorSet& ops)
{
    SbpResiduals r;
    const Eigen::SparseMatrix<double> m = ops.mass.sparse();
    const Eigen::SparseMatrix<double> d = ops.d_central.sparse();
    Eigen::SparseMatrix<double> central = m * d;
    Eigen::SparseMatrix<double> dt = d.transpose();
    central += dt * m;
    r.central_residual = max_abs(central);

    const Field ones = Field::Ones(static_cast<Eigen::Index>(ops.grid.n));
    r.consistency_residual = ops.d_central.apply(ones).abs().maxCoeff();
    r.mass_normalization_error = std::abs(quadrature(ops.mass, ones) - ops.grid.length());

    if (ops.has_upwind()) {
        const Eigen::SparseMatrix<double> dp = ops.d_plus->sparse();
        const Eigen::SparseMatrix<double> dm = ops.d_minus->sparse();
        Eigen::SparseMatrix<double> adj = m * dp;
        Eigen::SparseMatrix<double> dmt = dm.transpose();
        adj += dmt * m;
        r.upwind_adjoint_residual = max_abs(adj);

        r.consistency_residual = std::max({r.consistency_residual,
                                           ops.d_plus->apply(ones).abs().maxCoeff(),
                                           ops.d_minus->apply(ones).abs().maxCoeff()});

        Eigen::SparseMatrix<double> diff_sp = dp - dm;
        diff_sp = m * diff_sp;
        const Eigen::MatrixXd diff = Eigen::MatrixXd(diff_sp);
        const Eigen::MatrixXd sym = 0.5 * (diff + diff.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        r.dissipativity_max_eig = es.eigenvalues().maxCoeff();
    }
    return r;
}

} // namespace sgn
