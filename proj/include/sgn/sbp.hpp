#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace sgn {

/// Nodal values on a periodic grid. Nonlinear operations are pointwise.
using Field = Eigen::ArrayXd;

/// Uniform periodic grid; node i sits at x_min + i*dx, node n wraps onto x_min.
struct PeriodicGrid {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;
    double dx = 0.0;

    double length() const { return x_max - x_min; }
    double node(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    Field nodes() const;
};

PeriodicGrid make_grid(double x_min, double x_max, std::size_t n);

enum class StencilKind { central, upwind_plus, upwind_minus };

std::string to_string(StencilKind kind);

/// Whether a scheme uses the central operator only or the upwind pair.
enum class OperatorMode { central, upwind };

std::string to_string(OperatorMode mode);
OperatorMode parse_operator_mode(const std::string& s);

/// A sparse (row, col, value) entry used for debugging exports.
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Periodic circulant first-derivative operator stored as a stencil.
///
/// The stencil is kept unscaled (grid spacing 1); `coefficient` and `apply`
/// include the 1/dx factor.
class DerivativeOperator {
public:
    DerivativeOperator(StencilKind kind, int order, int first_offset,
                       std::vector<double> unit_coefficients, PeriodicGrid grid);

    StencilKind kind() const { return kind_; }
    int order() const { return order_; }
    const PeriodicGrid& grid() const { return grid_; }

    int first_offset() const { return first_offset_; }
    int last_offset() const { return first_offset_ + static_cast<int>(coeffs_.size()) - 1; }
    std::size_t width() const { return coeffs_.size(); }

    /// Unscaled coefficient for the given offset, zero outside the stencil.
    double unit_coefficient(int offset) const;
    /// Coefficient including the 1/dx factor.
    double coefficient(int offset) const { return unit_coefficient(offset) / grid_.dx; }
    const std::vector<double>& unit_coefficients() const { return coeffs_; }

    Field apply(const Field& f) const;
    void apply(std::span<const double> f, std::span<double> out) const;

    std::vector<Triplet> triplets() const;
    Eigen::SparseMatrix<double> sparse() const;

private:
    StencilKind kind_;
    int order_;
    int first_offset_;
    std::vector<double> coeffs_;
    PeriodicGrid grid_;
};

Field apply(const DerivativeOperator& op, const Field& f);

/// Diagonal mass/norm matrix; weights sum to the domain length.
struct MassMatrix {
    Field weights;
    PeriodicGrid grid;

    Eigen::SparseMatrix<double> sparse() const;
};

MassMatrix uniform_mass(const PeriodicGrid& grid);

/// 1^T M f
double quadrature(const MassMatrix& mass, const Field& f);

struct CentralOperator {
    DerivativeOperator d;
    MassMatrix mass;
};

struct UpwindOperators {
    DerivativeOperator plus;
    DerivativeOperator minus;
    MassMatrix mass;
};

/// Central SBP operator of accuracy order 2, 4 or 6.
CentralOperator build_central(const PeriodicGrid& grid, int order);

/// Upwind SBP pair D+, D- of interior accuracy order 1..6.
///
/// D+ is biased to the right; D- is its reflection-negation so that
/// M D+ + D-^T M = 0 holds exactly for M = dx*I.
UpwindOperators build_upwind_pair(const PeriodicGrid& grid, int order);

/// Everything a scheme needs: grid, M, D and optionally D+/D- with D = (D+ + D-)/2.
struct OperatorSet {
    PeriodicGrid grid;
    MassMatrix mass;
    DerivativeOperator d_central;
    std::optional<DerivativeOperator> d_plus;
    std::optional<DerivativeOperator> d_minus;
    int order = 0;

    bool has_upwind() const { return d_plus.has_value() && d_minus.has_value(); }
    const DerivativeOperator& plus() const;
    const DerivativeOperator& minus() const;
};

OperatorSet central_operator_set(const PeriodicGrid& grid, int order);
OperatorSet upwind_operator_set(const PeriodicGrid& grid, int order);

struct SbpResiduals {
    double central_residual = 0.0;
    double upwind_adjoint_residual = 0.0;
    double dissipativity_max_eig = 0.0;
    double consistency_residual = 0.0;
    double mass_normalization_error = 0.0;
};

SbpResiduals sbp_residuals(const OperatorSet& ops);

/// Finite-difference weights for the first derivative at 0 using integer offsets
/// (Fornberg's recursion). Exposed for diagnostics.
std::vector<double> first_derivative_weights(std::span<const int> offsets);

} // namespace sgn
