#include "sgn/swe.hpp"

#include "sgn/elliptic.hpp"
#include "sgn/errors.hpp"
#include "sgn/viscosity.hpp"

namespace sgn {

SweTendency rhs_swe(const SweState& s, const OperatorSet& ops, const Field* momentum_forcing)
{
    require_positive_height(s.h, "rhs_swe");
    const DerivativeOperator& d = ops.d_central;
    const Field& h = s.h;
    const Field& u = s.u;
    const Field hb = h + s.b;

    const Field dh = d.apply(h);
    const Field du = d.apply(u);

    SweTendency out;
    out.h_t = -(u * dh + h * du);

    const Field hhb = h * hb;
    const Field u2 = u.square();
    const Field hu = h * u;
    Field m = s.g * d.apply(hhb) - s.g * hb * dh + 0.5 * h * d.apply(u2) - 0.5 * u2 * dh +
              0.5 * u * d.apply(hu) - 0.5 * hu * du;
    if (momentum_forcing) {
        m -= *momentum_forcing;
    }
    out.u_t = -m / h;
    return out;
}

double energy_swe(const SweState& s, const OperatorSet& ops)
{
    const Field e = 0.5 * s.g * s.h.square() + s.g * s.h * s.b + 0.5 * s.h * s.u.square();
    return quadrature(ops.mass, e);
}

SweModel::SweModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode)
    : Model(std::move(ops), std::move(b), params, mode)
{
}

void SweModel::rhs(double t, const State& y, State& dy)
{
    const std::size_t nn = n();
    SweState s{field(y, 0), field(y, 1), b_, params_.g};
    std::vector<Field> src;
    if (source_) {
        src.assign(2, Field::Zero(nn));
        source_(t, src);
    }
    Field forcing = Field::Zero(nn);
    if (mu_ > 0.0) {
        require_positive_height(s.h, "rhs_swe");
        forcing += av_term(ops_, mu_, s.h, s.u, mode_);
    }
    if (source_) {
        forcing += src[1];
    }
    SweTendency tend = rhs_swe(s, ops_, &forcing);
    if (source_) {
        tend.h_t += src[0];
    }
    dy.resize(y.size());
    dy.segment(0, nn) = tend.h_t.matrix();
    dy.segment(nn, nn) = tend.u_t.matrix();
}

double SweModel::energy(const State& y) const
{
    return energy_swe(SweState{field(y, 0), field(y, 1), b_, params_.g}, ops_);
}

State SweModel::energy_gradient(const State& y) const
{
    const std::size_t nn = n();
    const Field h = field(y, 0);
    const Field u = field(y, 1);
    State grad(y.size());
    grad.segment(0, nn) = (params_.g * (h + b_) + 0.5 * u.square()).matrix();
    grad.segment(nn, nn) = (h * u).matrix();
    return grad;
}

} // namespace sgn
