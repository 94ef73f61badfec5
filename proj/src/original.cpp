#include "sgn/original.hpp"

#include "sgn/errors.hpp"
#include "sgn/viscosity.hpp"

namespace sgn {

namespace {

struct Ops {
    const DerivativeOperator& d;
    const DerivativeOperator& dr;
    const DerivativeOperator& dl;
};

Ops select(const OperatorSet& ops, OperatorMode mode)
{
    if (mode == OperatorMode::upwind) {
        if (!ops.has_upwind()) {
            throw InvalidArgument("upwind mode requires an upwind operator set");
        }
        return {ops.d_central, ops.plus(), ops.minus()};
    }
    return {ops.d_central, ops.d_central, ops.d_central};
}

double bathymetry_coefficient(Variant v)
{
    switch (v) {
    case Variant::mild: return 0.75;
    case Variant::full: return 1.0;
    default: return 0.0;
    }
}

bool has_bathymetry(Variant v)
{
    return v == Variant::mild || v == Variant::full;
}

Field slope(const SgnState& s, const OperatorSet& ops)
{
    if (!has_bathymetry(s.variant)) {
        return Field::Zero(s.h.size());
    }
    return ops.d_central.apply(s.b);
}

} // namespace

Pressure pressure(const SgnState& s, const OperatorSet& ops, const Field& db)
{
    require_positive_height(s.h, "pressure");
    const Ops o = select(ops, s.mode);
    const Field& h = s.h;
    const Field& u = s.u;
    const Field dh = o.d.apply(h);
    const Field du = o.d.apply(u);
    const Field dlu = o.dl.apply(u);
    const Field h2 = h.square();

    Pressure p;
    p.p_plus = 0.5 * h2 * h * du * dlu + 0.5 * h2 * dh * u * dlu;
    const Field a = h2 * u * du;
    const Field c = h * du;
    p.p_zero = -(1.0 / 6.0) * h * o.d.apply(a) - (1.0 / 6.0) * h2 * u * o.d.apply(c);

    if (has_bathymetry(s.variant)) {
        const Field u2 = u.square();
        p.p_plus += -0.25 * h2 * db * u * du - 0.25 * h * dh * db * u2;
        const Field e = h * db * u2;
        const Field f = db * u;
        p.p_zero += 0.25 * h * o.d.apply(e) + 0.25 * h2 * u * o.d.apply(f);
    }
    return p;
}

Pressure pressure_flat(const SgnState& s, const OperatorSet& ops)
{
    SgnState flat = s;
    flat.variant = Variant::flat;
    return pressure(flat, ops, Field::Zero(s.h.size()));
}

Field momentum_rhs(const SgnState& s, const OperatorSet& ops, const Field* forcing)
{
    require_positive_height(s.h, "rhs_original");
    const Ops o = select(ops, s.mode);
    const DerivativeOperator& d = o.d;
    const Field& h = s.h;
    const Field& u = s.u;
    const Field db = slope(s, ops);
    const bool bathy = has_bathymetry(s.variant);

    const Field dh = d.apply(h);
    const Field du = d.apply(u);
    const Field u2 = u.square();
    const Field hu = h * u;

    Field m;
    if (bathy) {
        const Field hb = h + s.b;
        const Field hhb = h * hb;
        m = s.g * d.apply(hhb) - s.g * hb * dh;
    }
    else {
        const Field h2 = h.square();
        m = s.g * d.apply(h2) - s.g * h * dh;
    }
    m += 0.5 * h * d.apply(u2) - 0.5 * u2 * dh + 0.5 * u * d.apply(hu) - 0.5 * hu * du;

    const Pressure p = pressure(s, ops, db);
    m += o.dr.apply(p.p_plus) + d.apply(p.p_zero);
    if (bathy) {
        m += 1.5 * (p.p_plus + p.p_zero) / h * db;
    }
    if (s.variant == Variant::full) {
        const Field e = h * db * u2;
        const Field f = db * u;
        const Field psi = 0.125 * d.apply(e) + 0.125 * hu * d.apply(f) - 0.125 * h * db * u * du -
                          0.125 * dh * db * u2;
        m += psi * db;
    }
    Field y = -m;
    if (forcing) {
        y += *forcing;
    }
    return y;
}

SpdOperator assemble_for(const SgnState& s, const OperatorSet& ops)
{
    const bool up = s.mode == OperatorMode::upwind;
    switch (s.variant) {
    case Variant::mild: return assemble_mild(ops, s.h, s.b, up);
    case Variant::full: return assemble_full(ops, s.h, s.b, up);
    default: return assemble_flat(ops, s.h, up);
    }
}

SgnTendency rhs_original(const SgnState& s, const OperatorSet& ops, EllipticSolver& elliptic, const Field* forcing)
{
    require_positive_height(s.h, "rhs_original");
    const DerivativeOperator& d = ops.d_central;
    SgnTendency out;
    out.h_t = -(s.u * d.apply(s.h) + s.h * d.apply(s.u));
    const Field y = momentum_rhs(s, ops, forcing);
    elliptic.factorize(assemble_for(s, ops));
    out.u_t = elliptic.solve(y);
    return out;
}

double energy_original(const SgnState& s, const OperatorSet& ops)
{
    const Ops o = select(ops, s.mode);
    const Field dlu = o.dl.apply(s.u);
    const Field& h = s.h;
    const Field& u = s.u;
    Field e = 0.5 * h * u.square() + h.cube() * dlu.square() / 6.0;
    if (has_bathymetry(s.variant)) {
        const Field db = ops.d_central.apply(s.b);
        const double c = 0.5 * bathymetry_coefficient(s.variant);
        e += 0.5 * s.g * (h + s.b).square() - 0.5 * h.square() * db * dlu * u + c * h * db.square() * u.square();
    }
    else {
        e += 0.5 * s.g * h.square();
    }
    return quadrature(ops.mass, e);
}

double momentum(const Field& h, const Field& u, const MassMatrix& mass)
{
    return quadrature(mass, h * u);
}

OriginalModel::OriginalModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode, Variant variant,
                             SolveMethod method)
    : Model(std::move(ops), std::move(b), params, mode), variant_(variant), solver_(method)
{
    if (variant_ == Variant::variable) {
        throw InvalidArgument("sgn-original supports the flat, mild and full variants");
    }
    if (variant_ == Variant::flat) {
        b_.setZero();
    }
    if (mode_ == OperatorMode::upwind && !ops_.has_upwind()) {
        throw InvalidArgument("sgn-original upwind mode requires upwind operators");
    }
}

SgnState OriginalModel::unpack(const State& y) const
{
    return SgnState{field(y, 0), field(y, 1), b_, params_.g, variant_, mode_};
}

void OriginalModel::rhs(double t, const State& y, State& dy)
{
    const std::size_t nn = n();
    const SgnState s = unpack(y);
    require_positive_height(s.h, "rhs_original");
    Field forcing = Field::Zero(nn);
    if (mu_ > 0.0) {
        forcing += av_term(ops_, mu_, s.h, s.u, mode_);
    }
    std::vector<Field> src;
    if (source_) {
        src.assign(2, Field::Zero(nn));
        source_(t, src);
        forcing += src[1];
    }
    SgnTendency tend = rhs_original(s, ops_, solver_, &forcing);
    if (source_) {
        tend.h_t += src[0];
    }
    dy.resize(y.size());
    dy.segment(0, nn) = tend.h_t.matrix();
    dy.segment(nn, nn) = tend.u_t.matrix();
}

double OriginalModel::energy(const State& y) const
{
    return energy_original(unpack(y), ops_);
}

State OriginalModel::energy_gradient(const State& y) const
{
    const std::size_t nn = n();
    const SgnState s = unpack(y);
    const Ops o = select(ops_, mode_);
    const Field& h = s.h;
    const Field& u = s.u;
    const Field dlu = o.dl.apply(u);
    const Field h3dlu = h.cube() * dlu;

    Field gh = 0.5 * u.square() + 0.5 * h.square() * dlu.square();
    Field gu = h * u - o.dr.apply(h3dlu) / 3.0;
    if (has_bathymetry(variant_)) {
        const Field db = ops_.d_central.apply(s.b);
        const double c = 0.5 * bathymetry_coefficient(variant_);
        gh += s.g * (h + s.b) - h * db * dlu * u + c * db.square() * u.square();
        const Field h2dbu = h.square() * db * u;
        gu += 0.5 * o.dr.apply(h2dbu) - 0.5 * h.square() * db * dlu + 2.0 * c * h * db.square() * u;
    }
    else {
        gh += s.g * h;
    }
    State grad(y.size());
    grad.segment(0, nn) = gh.matrix();
    grad.segment(nn, nn) = gu.matrix();
    return grad;
}

} // namespace sgn
