#include "sgn/hyperbolic.hpp"

#include "sgn/elliptic.hpp"
#include "sgn/errors.hpp"
#include "sgn/viscosity.hpp"

namespace sgn {

AuxiliaryFields init_auxiliary(const Field& h, const Field& u, const OperatorSet& ops)
{
    if (h.size() != u.size()) {
        throw InvalidArgument("init_auxiliary: h and u lengths differ");
    }
    return {h, -h * ops.d_central.apply(u)};
}

namespace {

HypTendency rhs_impl(const HypState& s, const OperatorSet& ops, const HypForcing& f, bool variable)
{
    require_positive_height(s.h, "rhs_hyperbolic");
    const DerivativeOperator& d = ops.d_central;
    const Field& h = s.h;
    const Field& u = s.u;
    const Field& w = s.w;
    const Field& eta = s.eta;
    const double g = s.g;
    const double lam = s.lambda;

    const Field dh = d.apply(h);
    const Field du = d.apply(u);
    const Field dw = d.apply(w);
    const Field deta = d.apply(eta);
    const Field u2 = u.square();
    const Field hu = h * u;
    const Field eta_h = eta / h;

    HypTendency out;
    out.h_t = -(u * dh + h * du);

    Field m;
    if (variable) {
        const Field hb = h + s.b;
        const Field hhb = h * hb;
        m = g * d.apply(hhb) - g * hb * dh;
    }
    else {
        const Field h2 = h.square();
        m = g * d.apply(h2) - g * h * dh;
    }
    const Field eta2_h = eta * eta_h;
    m += 0.5 * h * d.apply(u2) - 0.5 * u2 * dh + 0.5 * u * d.apply(hu) - 0.5 * hu * du;
    m += (lam / 6.0) * eta_h.square() * dh + (lam / 3.0) * deta - (lam / 3.0) * eta_h * deta -
         (lam / 6.0) * d.apply(eta2_h);
    Field eta_t = w - u * deta;
    if (variable) {
        const Field db = d.apply(s.b);
        m += (lam / 2.0) * db - (lam / 2.0) * eta_h * db;
        eta_t -= 1.5 * u * db;
    }
    if (f.hu) {
        m -= *f.hu;
    }

    const Field huw = hu * w;
    Field r = (lam - lam * eta_h) -
              (0.5 * d.apply(huw) + 0.5 * hu * dw - 0.5 * u * w * dh - 0.5 * h * w * du);
    if (f.hw) {
        r += *f.hw;
    }
    if (f.h) {
        out.h_t += *f.h;
    }
    if (f.eta) {
        eta_t += *f.eta;
    }
    out.u_t = -m / h;
    out.w_t = r / h;
    out.eta_t = std::move(eta_t);
    return out;
}

} // namespace

HypTendency rhs_hyperbolic_flat(const HypState& s, const OperatorSet& ops, const HypForcing& f)
{
    return rhs_impl(s, ops, f, false);
}

HypTendency rhs_hyperbolic_variable(const HypState& s, const OperatorSet& ops, const HypForcing& f)
{
    return rhs_impl(s, ops, f, true);
}

double energy_hyperbolic(const HypState& s, const OperatorSet& ops)
{
    const Field hb = s.h + s.b;
    const Field e = 0.5 * s.g * hb.square() + 0.5 * s.h * s.u.square() + s.h * s.w.square() / 6.0 +
                    (s.lambda / 6.0) * s.h - (s.lambda / 3.0) * s.eta +
                    (s.lambda / 6.0) * s.eta.square() / s.h;
    return quadrature(ops.mass, e);
}

HyperbolicModel::HyperbolicModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode, bool variable)
    : Model(std::move(ops), std::move(b), params, mode), variable_(variable)
{
    if (!variable_) {
        b_.setZero();
    }
}

HypState HyperbolicModel::unpack(const State& y) const
{
    return HypState{field(y, 0), field(y, 1), field(y, 2), field(y, 3), b_, params_.g, params_.lambda};
}

void HyperbolicModel::rhs(double t, const State& y, State& dy)
{
    const std::size_t nn = n();
    const HypState s = unpack(y);
    std::vector<Field> src;
    HypForcing f;
    Field momentum = Field::Zero(nn);
    if (mu_ > 0.0) {
        require_positive_height(s.h, "rhs_hyperbolic");
        momentum += av_term(ops_, mu_, s.h, s.u, mode_);
    }
    if (source_) {
        src.assign(4, Field::Zero(nn));
        source_(t, src);
        momentum += src[1];
        f.h = &src[0];
        f.hw = &src[2];
        f.eta = &src[3];
    }
    f.hu = &momentum;
    const HypTendency tend = variable_ ? rhs_hyperbolic_variable(s, ops_, f) : rhs_hyperbolic_flat(s, ops_, f);
    dy.resize(y.size());
    dy.segment(0, nn) = tend.h_t.matrix();
    dy.segment(nn, nn) = tend.u_t.matrix();
    dy.segment(2 * nn, nn) = tend.w_t.matrix();
    dy.segment(3 * nn, nn) = tend.eta_t.matrix();
}

double HyperbolicModel::energy(const State& y) const
{
    return energy_hyperbolic(unpack(y), ops_);
}

State HyperbolicModel::energy_gradient(const State& y) const
{
    const std::size_t nn = n();
    const HypState s = unpack(y);
    const double lam = s.lambda;
    const Field eta_h = s.eta / s.h;
    State grad(y.size());
    grad.segment(0, nn) = (s.g * (s.h + s.b) + 0.5 * s.u.square() + s.w.square() / 6.0 + lam / 6.0 -
                           (lam / 6.0) * eta_h.square())
                              .matrix();
    grad.segment(nn, nn) = (s.h * s.u).matrix();
    grad.segment(2 * nn, nn) = (s.h * s.w / 3.0).matrix();
    grad.segment(3 * nn, nn) = (-lam / 3.0 + (lam / 3.0) * eta_h).matrix();
    return grad;
}

State HyperbolicModel::initial_state(const Field& h, const Field& u) const
{
    const std::size_t nn = n();
    const AuxiliaryFields aux = init_auxiliary(h, u, ops_);
    State y(4 * nn);
    y.segment(0, nn) = h.matrix();
    y.segment(nn, nn) = u.matrix();
    y.segment(2 * nn, nn) = aux.w.matrix();
    y.segment(3 * nn, nn) = aux.eta.matrix();
    return y;
}

} // namespace sgn
