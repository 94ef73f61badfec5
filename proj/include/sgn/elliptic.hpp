#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/SparseCore>

#include "sgn/sbp.hpp"

namespace sgn {

enum class EllipticVariant { flat_central, flat_upwind, mild_central, mild_upwind, full_central, full_upwind };

std::string to_string(EllipticVariant v);

enum class SolveMethod { direct, cg };

/// Elliptic operator multiplying du/dt in the classical SGN schemes, e.g.
/// A = h - 1/3 D+ h^3 D-  (+ bathymetry terms). M*A is symmetric positive definite.
struct SpdOperator {
    EllipticVariant variant;
    Eigen::SparseMatrix<double> matrix;
    MassMatrix mass;
    Field height;
    std::uint64_t source_h_hash = 0;

    /// M*A, the symmetric form that is factorized.
    Eigen::SparseMatrix<double> weighted() const;
    Field apply(const Field& x) const;
};

/// Throws StateError naming the first node with h <= 0 (or non-finite h).
void require_positive_height(const Field& h, const char* context);

std::uint64_t hash_field(const Field& f);

SpdOperator assemble_flat(const OperatorSet& ops, const Field& h, bool use_upwind);
SpdOperator assemble_mild(const OperatorSet& ops, const Field& h, const Field& b, bool use_upwind);
SpdOperator assemble_full(const OperatorSet& ops, const Field& h, const Field& b, bool use_upwind);

/// Shared assembly: h - 1/3 Dr h^3 Dl + 1/2 Dr h^2 (Db) - 1/2 h^2 (Db) Dl + c_b2 h (Db)^2,
/// with (Dr, Dl) = (D+, D-) or (D, D).
SpdOperator assemble_elliptic(const OperatorSet& ops, const Field& h, const Field& db,
                              double bathymetry_coefficient, bool use_upwind, EllipticVariant variant);

/// Factorization holder. The symbolic analysis is reused while the sparsity
/// pattern stays the same; the numeric factorization is redone on `factorize`.
class EllipticSolver {
public:
    explicit EllipticSolver(SolveMethod method = SolveMethod::direct);
    ~EllipticSolver();
    EllipticSolver(EllipticSolver&&) noexcept;
    EllipticSolver& operator=(EllipticSolver&&) noexcept;
    EllipticSolver(const EllipticSolver&) = delete;
    EllipticSolver& operator=(const EllipticSolver&) = delete;

    void factorize(const SpdOperator& op);
    bool has_factorization() const;
    std::uint64_t factorized_hash() const;

    /// Solves A x = rhs with the current factorization.
    Field solve(const Field& rhs) const;

    SolveMethod method() const { return method_; }

private:
    struct Impl;
    SolveMethod method_;
    std::unique_ptr<Impl> impl_;
};

/// One-shot solve; ||A x - rhs||_M <= 1e-10 ||rhs||_M or NumericalFailure.
Field solve(const SpdOperator& op, const Field& rhs, SolveMethod method = SolveMethod::direct);

struct SpdCheck {
    double symmetry_residual = 0.0;
    double min_rayleigh = 0.0;
    /// min over probes of v^T M A v - v^T diag(h) M v, scaled by v^T M v.
    double min_excess_over_h = 0.0;
};

SpdCheck verify_spd(const SpdOperator& op, std::size_t probes = 64, std::uint64_t seed = 20240601);

} // namespace sgn
