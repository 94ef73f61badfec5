#include "sgn/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "sgn/errors.hpp"

namespace sgn {

std::string to_string(EllipticVariant v)
{
    switch (v) {
    case EllipticVariant::flat_central: return "flat_central";
    case EllipticVariant::flat_upwind: return "flat_upwind";
    case EllipticVariant::mild_central: return "mild_central";
    case EllipticVariant::mild_upwind: return "mild_upwind";
    case EllipticVariant::full_central: return "full_central";
    case EllipticVariant::full_upwind: return "full_upwind";
    }
    return "unknown";
}

void require_positive_height(const Field& h, const char* context)
{
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !std::isfinite(h[i])) {
            throw StateError(std::string(context) + ": water height must be positive, h[" +
                                 std::to_string(i) + "] = " + std::to_string(h[i]),
                             static_cast<std::size_t>(i));
        }
    }
}

std::uint64_t hash_field(const Field& f)
{
    std::uint64_t hash = 14695981039346656037ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(f.data());
    const std::size_t len = static_cast<std::size_t>(f.size()) * sizeof(double);
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

Eigen::SparseMatrix<double> SpdOperator::weighted() const
{
    Eigen::SparseMatrix<double> m = mass.sparse() * matrix;
    return m;
}

Field SpdOperator::apply(const Field& x) const
{
    const Eigen::VectorXd y = matrix * x.matrix();
    return y.array();
}

namespace {

// Row-wise accumulation of banded periodic products. Entries of row i live at
// columns i + offset with offset in [lo, hi].
class BandedAccumulator {
public:
    BandedAccumulator(std::size_t n, int lo, int hi)
        : n_(n), lo_(lo), width_(static_cast<std::size_t>(hi - lo + 1)), values_(n * width_, 0.0)
    {
    }

    void add(std::size_t row, int offset, double value)
    {
        values_[row * width_ + static_cast<std::size_t>(offset - lo_)] += value;
    }

    Eigen::SparseMatrix<double> build() const
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(values_.size());
        const auto n = static_cast<long>(n_);
        for (long i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < width_; ++k) {
                long j = (i + lo_ + static_cast<long>(k)) % n;
                if (j < 0) {
                    j += n;
                }
                t.emplace_back(static_cast<int>(i), static_cast<int>(j),
                               values_[static_cast<std::size_t>(i) * width_ + k]);
            }
        }
        Eigen::SparseMatrix<double> m(static_cast<int>(n_), static_cast<int>(n_));
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }

private:
    std::size_t n_;
    int lo_;
    std::size_t width_;
    std::vector<double> values_;
};

std::size_t wrap(long i, long n)
{
    long j = i % n;
    if (j < 0) {
        j += n;
    }
    return static_cast<std::size_t>(j);
}

} // namespace

SpdOperator assemble_elliptic(const OperatorSet& ops, const Field& h, const Field& db,
                              double bathymetry_coefficient, bool use_upwind, EllipticVariant variant)
{
    const std::size_t n = ops.grid.n;
    if (static_cast<std::size_t>(h.size()) != n || static_cast<std::size_t>(db.size()) != n) {
        throw InvalidArgument("assemble_elliptic: field length does not match grid");
    }
    require_positive_height(h, "assemble_elliptic");

    const DerivativeOperator& dr = use_upwind ? ops.plus() : ops.d_central;
    const DerivativeOperator& dl = use_upwind ? ops.minus() : ops.d_central;

    const int lo = std::min({0, dr.first_offset() + dl.first_offset(), dr.first_offset(), dl.first_offset()});
    const int hi = std::max({0, dr.last_offset() + dl.last_offset(), dr.last_offset(), dl.last_offset()});
    BandedAccumulator acc(n, lo, hi);

    const Field h3 = h.cube();
    const Field h2db = h.square() * db;
    const Field hdb2 = h * db.square();
    const double inv_dx = 1.0 / ops.grid.dx;
    const auto ni = static_cast<long>(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<long>(i);
        acc.add(i, 0, h[static_cast<Eigen::Index>(i)] +
                          bathymetry_coefficient * hdb2[static_cast<Eigen::Index>(i)]);
        // -1/3 Dr diag(h^3) Dl
        for (int r = dr.first_offset(); r <= dr.last_offset(); ++r) {
            const double cr = dr.unit_coefficient(r) * inv_dx;
            if (cr == 0.0) {
                continue;
            }
            const std::size_t k = wrap(ii + r, ni);
            const double s = h3[static_cast<Eigen::Index>(k)];
            for (int l = dl.first_offset(); l <= dl.last_offset(); ++l) {
                const double cl = dl.unit_coefficient(l) * inv_dx;
                if (cl != 0.0) {
                    acc.add(i, r + l, -cr * s * cl / 3.0);
                }
            }
            // +1/2 Dr diag(h^2 Db)
            acc.add(i, r, 0.5 * cr * h2db[static_cast<Eigen::Index>(k)]);
        }
        // -1/2 diag(h^2 Db) Dl
        for (int l = dl.first_offset(); l <= dl.last_offset(); ++l) {
            const double cl = dl.unit_coefficient(l) * inv_dx;
            if (cl != 0.0) {
                acc.add(i, l, -0.5 * h2db[static_cast<Eigen::Index>(i)] * cl);
            }
        }
    }

    SpdOperator op{variant, acc.build(), ops.mass, h, hash_field(h)};
    return op;
}

SpdOperator assemble_flat(const OperatorSet& ops, const Field& h, bool use_upwind)
{
    const Field db = Field::Zero(h.size());
    return assemble_elliptic(ops, h, db, 0.0, use_upwind,
                             use_upwind ? EllipticVariant::flat_upwind : EllipticVariant::flat_central);
}

SpdOperator assemble_mild(const OperatorSet& ops, const Field& h, const Field& b, bool use_upwind)
{
    const Field db = ops.d_central.apply(b);
    return assemble_elliptic(ops, h, db, 0.75, use_upwind,
                             use_upwind ? EllipticVariant::mild_upwind : EllipticVariant::mild_central);
}

SpdOperator assemble_full(const OperatorSet& ops, const Field& h, const Field& b, bool use_upwind)
{
    const Field db = ops.d_central.apply(b);
    return assemble_elliptic(ops, h, db, 1.0, use_upwind,
                             use_upwind ? EllipticVariant::full_upwind : EllipticVariant::full_central);
}

struct EllipticSolver::Impl {
    using Matrix = Eigen::SparseMatrix<double>;
    Eigen::SimplicialLDLT<Matrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    Matrix weighted;
    Matrix matrix;
    Field weights;
    std::vector<int> pattern_outer;
    std::vector<int> pattern_inner;
    bool analyzed = false;
    bool factorized = false;
    std::uint64_t hash = 0;
};

EllipticSolver::EllipticSolver(SolveMethod method) : method_(method), impl_(std::make_unique<Impl>())
{
    impl_->cg.setTolerance(1e-12);
}

EllipticSolver::~EllipticSolver() = default;
EllipticSolver::EllipticSolver(EllipticSolver&&) noexcept = default;
EllipticSolver& EllipticSolver::operator=(EllipticSolver&&) noexcept = default;

void EllipticSolver::factorize(const SpdOperator& op)
{
    Impl& s = *impl_;
    s.matrix = op.matrix;
    s.weighted = op.weighted();
    s.weighted.makeCompressed();
    s.weights = op.mass.weights;
    s.hash = op.source_h_hash;
    s.factorized = false;

    if (method_ == SolveMethod::direct) {
        const auto nouter = static_cast<std::size_t>(s.weighted.outerSize() + 1);
        const auto nnz = static_cast<std::size_t>(s.weighted.nonZeros());
        const bool same_pattern =
            s.analyzed && s.pattern_outer.size() == nouter && s.pattern_inner.size() == nnz &&
            std::equal(s.pattern_outer.begin(), s.pattern_outer.end(), s.weighted.outerIndexPtr()) &&
            std::equal(s.pattern_inner.begin(), s.pattern_inner.end(), s.weighted.innerIndexPtr());
        if (!same_pattern) {
            s.ldlt.analyzePattern(s.weighted);
            s.pattern_outer.assign(s.weighted.outerIndexPtr(), s.weighted.outerIndexPtr() + nouter);
            s.pattern_inner.assign(s.weighted.innerIndexPtr(), s.weighted.innerIndexPtr() + nnz);
            s.analyzed = true;
        }
        s.ldlt.factorize(s.weighted);
        if (s.ldlt.info() != Eigen::Success) {
            throw NumericalFailure("EllipticSolver: sparse LDL^T factorization failed");
        }
    }
    else {
        s.cg.compute(s.weighted);
        if (s.cg.info() != Eigen::Success) {
            throw NumericalFailure("EllipticSolver: CG setup failed");
        }
    }
    s.factorized = true;
}

bool EllipticSolver::has_factorization() const
{
    return impl_->factorized;
}

std::uint64_t EllipticSolver::factorized_hash() const
{
    return impl_->hash;
}

Field EllipticSolver::solve(const Field& rhs) const
{
    const Impl& s = *impl_;
    if (!s.factorized) {
        throw NumericalFailure("EllipticSolver: solve called before factorize");
    }
    if (rhs.size() != s.weights.size()) {
        throw InvalidArgument("EllipticSolver: rhs length does not match operator size");
    }
    const Eigen::VectorXd b = (s.weights * rhs).matrix();
    Eigen::VectorXd x;
    if (method_ == SolveMethod::direct) {
        x = s.ldlt.solve(b);
        if (s.ldlt.info() != Eigen::Success) {
            throw NumericalFailure("EllipticSolver: triangular solves failed");
        }
    }
    else {
        x = s.cg.solve(b);
        if (s.cg.info() != Eigen::Success) {
            throw NumericalFailure("EllipticSolver: CG did not converge");
        }
    }
    return x.array();
}

Field solve(const SpdOperator& op, const Field& rhs, SolveMethod method)
{
    EllipticSolver solver(method);
    solver.factorize(op);
    Field x = solver.solve(rhs);

    const Field r = op.apply(x) - rhs;
    const double res = std::sqrt((op.mass.weights * r.square()).sum());
    const double ref = std::sqrt((op.mass.weights * rhs.square()).sum());
    if (!(res <= 1e-10 * ref) && ref > 0.0) {
        throw NumericalFailure("solve: residual " + std::to_string(res) + " exceeds 1e-10 * " +
                               std::to_string(ref));
    }
    return x;
}

SpdCheck verify_spd(const SpdOperator& op, std::size_t probes, std::uint64_t seed)
{
    SpdCheck check;
    const Eigen::SparseMatrix<double> ma = op.weighted();
    const Eigen::SparseMatrix<double> mat = ma.transpose();
    const Eigen::SparseMatrix<double> asym = ma - mat;
    double max_asym = 0.0;
    double max_entry = 0.0;
    for (int k = 0; k < asym.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(asym, k); it; ++it) {
            max_asym = std::max(max_asym, std::abs(it.value()));
        }
    }
    for (int k = 0; k < ma.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(ma, k); it; ++it) {
            max_entry = std::max(max_entry, std::abs(it.value()));
        }
    }
    check.symmetry_residual = max_entry > 0.0 ? max_asym / max_entry : 0.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = op.matrix.rows();
    check.min_rayleigh = std::numeric_limits<double>::infinity();
    check.min_excess_over_h = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < probes; ++p) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v[i] = normal(rng);
        }
        const double vmav = v.dot(ma * v);
        const double vmv = (op.mass.weights * v.array().square()).sum();
        const double vhmv = (op.mass.weights * op.height * v.array().square()).sum();
        check.min_rayleigh = std::min(check.min_rayleigh, vmav / vmv);
        check.min_excess_over_h = std::min(check.min_excess_over_h, (vmav - vhmv) / vmv);
    }
    return check;
}

} // namespace sgn
