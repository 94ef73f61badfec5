#include <random>

#include "doctest.h"

#include "sgn/elliptic.hpp"
#include "sgn/errors.hpp"
#include "support.hpp"

using namespace sgn;
using testing::Dense;
using testing::Vec;

namespace {

Dense dense(const Eigen::SparseMatrix<double>& s)
{
    return Dense(s);
}

/// h - 1/3 Dr h^3 Dl + 1/2 Dr h^2 Db - 1/2 h^2 Db Dl + c h Db^2, all dense.
Dense oracle(const Dense& dr, const Dense& dl, const Vec& h, const Vec& db, double c)
{
    const Vec h2 = h.cwiseProduct(h);
    const Vec h3 = h2.cwiseProduct(h);
    return testing::diag(h) - dr * testing::diag(h3) * dl / 3.0 + 0.5 * dr * testing::diag(h2.cwiseProduct(db)) -
           0.5 * testing::diag(h2.cwiseProduct(db)) * dl + c * testing::diag(h.cwiseProduct(db).cwiseProduct(db));
}

struct Inputs {
    PeriodicGrid grid;
    Field h;
    Field b;
};

Inputs random_inputs(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const PeriodicGrid g = make_grid(0.0, 2.0, n);
    return {g, testing::random_smooth(g, rng, 1.0, 0.3), testing::random_smooth(g, rng, -0.5, 0.3)};
}

} // namespace

TEST_CASE("constant height reductions")
{
    const std::size_t n = 8;
    const PeriodicGrid g = make_grid(0.0, 1.0, n);
    const Dense id = Dense::Identity(n, n);

    const SpdOperator up = assemble_flat(upwind_operator_set(g, 1), Field::Ones(n), true);
    const Dense second = testing::circulant(n, -1, {1.0, -2.0, 1.0}, g.dx * g.dx);
    CHECK(testing::max_abs(dense(up.matrix) - (id - second / 3.0)) < 1e-10);

    const OperatorSet c2 = central_operator_set(g, 2);
    const SpdOperator cen = assemble_flat(c2, Field::Ones(n), false);
    const Dense wide = testing::circulant(n, -2, {0.25, 0.0, -0.5, 0.0, 0.25}, g.dx * g.dx);
    CHECK(testing::max_abs(dense(cen.matrix) - (id - wide / 3.0)) < 1e-10);
    const Dense d = testing::circulant(n, -1, {-0.5, 0.0, 0.5}, g.dx);
    CHECK(testing::max_abs(dense(cen.matrix) - (id - d * d / 3.0)) < 1e-10);
}

TEST_CASE("dense oracle for every variant")
{
    const Inputs in = random_inputs(24, 7);
    for (int p : {1, 2, 4}) {
        const OperatorSet ops = upwind_operator_set(in.grid, p);
        const Dense d = testing::dense_of(ops.d_central);
        const Dense dp = testing::dense_of(ops.plus());
        const Dense dm = testing::dense_of(ops.minus());
        const Vec h = testing::vec(in.h);
        const Vec db = d * testing::vec(in.b);
        const Vec zero = Vec::Zero(h.size());
        for (bool up : {false, true}) {
            const Dense& dr = up ? dp : d;
            const Dense& dl = up ? dm : d;
            CAPTURE(p);
            CAPTURE(up);
            const double scale = testing::max_abs(oracle(dr, dl, h, zero, 0.0));
            CHECK(testing::max_abs(dense(assemble_flat(ops, in.h, up).matrix) - oracle(dr, dl, h, zero, 0.0)) <
                  1e-13 * scale);
            CHECK(testing::max_abs(dense(assemble_mild(ops, in.h, in.b, up).matrix) - oracle(dr, dl, h, db, 0.75)) <
                  1e-13 * scale);
            CHECK(testing::max_abs(dense(assemble_full(ops, in.h, in.b, up).matrix) - oracle(dr, dl, h, db, 1.0)) <
                  1e-13 * scale);
        }
    }
}

TEST_CASE("bathymetry variants")
{
    const Inputs in = random_inputs(32, 11);
    const OperatorSet ops = upwind_operator_set(in.grid, 2);
    const Field flat_b = Field::Constant(32, -3.0);
    for (bool up : {false, true}) {
        const Dense flat = dense(assemble_flat(ops, in.h, up).matrix);
        CHECK(testing::max_abs(dense(assemble_mild(ops, in.h, flat_b, up).matrix) - flat) < 1e-12);
        CHECK(testing::max_abs(dense(assemble_full(ops, in.h, flat_b, up).matrix) - flat) < 1e-12);

        const Field db = ops.d_central.apply(in.b);
        const Dense diff = dense(assemble_full(ops, in.h, in.b, up).matrix) -
                           dense(assemble_mild(ops, in.h, in.b, up).matrix);
        const Dense expect = testing::diag(testing::vec(0.25 * in.h * db.square()));
        CHECK(testing::max_abs(diff - expect) < 1e-12);
    }

    const double s = 0.3;
    const OperatorSet c2 = central_operator_set(in.grid, 2);
    const Field ones = Field::Ones(32);
    const Dense ramp = dense(assemble_elliptic(c2, ones, Field::Constant(32, s), 0.75, false,
                                               EllipticVariant::mild_central).matrix);
    const Dense base = dense(assemble_flat(c2, ones, false).matrix);
    CHECK(testing::max_abs(ramp - base - 0.75 * s * s * Dense::Identity(32, 32)) < 1e-12);
}

TEST_CASE("symmetry and lower bound")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    const Inputs in = random_inputs(64, 5);
    for (bool up : {false, true}) {
        const OperatorSet ops = upwind_operator_set(in.grid, 3);
        for (const SpdOperator& a : {assemble_flat(ops, in.h, up), assemble_mild(ops, in.h, in.b, up),
                                     assemble_full(ops, in.h, in.b, up)}) {
            const Dense ma = dense(a.weighted());
            CHECK(testing::max_abs(ma - ma.transpose()) <= 1e-13 * testing::max_abs(ma));
            const Vec w = testing::vec(a.mass.weights);
            for (int k = 0; k < 100; ++k) {
                Vec v(64);
                for (auto& x : v) {
                    x = normal(rng);
                }
                const double lhs = v.dot(ma * v);
                const double rhs = v.dot(w.cwiseProduct(testing::vec(in.h)).cwiseProduct(v));
                CHECK(lhs >= rhs * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("verify_spd")
{
    const PeriodicGrid g = make_grid(0.0, 1.0, 64);
    const OperatorSet ops = upwind_operator_set(g, 2);
    const SpdCheck flat = verify_spd(assemble_flat(ops, Field::Ones(64), true));
    CHECK(flat.min_rayleigh >= 1.0 - 1e-12);
    CHECK(flat.symmetry_residual <= 1e-13);

    const Inputs in = random_inputs(64, 9);
    const OperatorSet ops2 = upwind_operator_set(in.grid, 4);
    const SpdCheck mild = verify_spd(assemble_mild(ops2, in.h, in.b, false));
    CHECK(mild.min_rayleigh >= in.h.minCoeff() * (1.0 - 1e-10));
    CHECK(mild.min_excess_over_h >= -1e-10);
    CHECK(mild.symmetry_residual <= 1e-13);
}

TEST_CASE("solves")
{
    const Inputs in = random_inputs(48, 13);
    const OperatorSet ops = upwind_operator_set(in.grid, 2);
    std::mt19937_64 rng(1);
    const Field target = testing::random_smooth(in.grid, rng, 0.0, 1.0, 4);
    for (SolveMethod method : {SolveMethod::direct, SolveMethod::cg}) {
        for (const SpdOperator& a : {assemble_flat(ops, Field::Ones(48), false), assemble_full(ops, in.h, in.b, true)}) {
            const Field rhs = a.apply(target);
            CHECK((solve(a, rhs, method) - target).abs().maxCoeff() < 1e-10);
            CHECK(solve(a, Field::Zero(48), method).abs().maxCoeff() == 0.0);

            const Field x = solve(a, rhs, method);
            const Field r = a.apply(x) - rhs;
            CHECK(std::sqrt(quadrature(a.mass, r.square())) <= 1e-10 * std::sqrt(quadrature(a.mass, rhs.square())));
        }
    }

    EllipticSolver solver;
    CHECK_FALSE(solver.has_factorization());
    CHECK_THROWS_AS(solver.solve(Field::Zero(48)), NumericalFailure);
    const SpdOperator a = assemble_mild(ops, in.h, in.b, true);
    solver.factorize(a);
    CHECK(solver.factorized_hash() == hash_field(in.h));
    const Field rhs = a.apply(target);
    CHECK((solver.solve(rhs) - target).abs().maxCoeff() < 1e-10);
    // Refactorizing with a new height reuses the symbolic analysis.
    solver.factorize(assemble_mild(ops, 1.1 * in.h, in.b, true));
    CHECK((solver.solve(assemble_mild(ops, 1.1 * in.h, in.b, true).apply(target)) - target).abs().maxCoeff() <
          1e-10);
}

TEST_CASE("positivity guard")
{
    Field h = Field::Ones(10);
    h(6) = -0.1;
    try {
        require_positive_height(h, "test");
        FAIL("expected StateError");
    }
    catch (const StateError& e) {
        CHECK(e.node() == 6);
    }
    const PeriodicGrid g = make_grid(0.0, 1.0, 10);
    CHECK_THROWS_AS(assemble_flat(central_operator_set(g, 2), h, false), StateError);
    CHECK(hash_field(Field::Ones(10)) != hash_field(h));
}
