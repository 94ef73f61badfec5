#include "sgn/viscosity.hpp"

#include <cmath>

#include "sgn/errors.hpp"

namespace sgn {

double av_coefficient(double dx, int p, double c)
{
    if (!(dx > 0.0)) {
        throw InvalidArgument("av_coefficient: dx must be positive");
    }
    if (p < 1) {
        throw InvalidArgument("av_coefficient: order must be at least 1");
    }
    if (c < 0.0) {
        throw InvalidArgument("av_coefficient: constant must be non-negative");
    }
    return c * std::pow(dx, p) / p;
}

Field av_term(const OperatorSet& ops, double mu, const Field& h, const Field& u, OperatorMode mode)
{
    if (mu == 0.0) {
        return Field::Zero(u.size());
    }
    if (mode == OperatorMode::upwind) {
        const Field flux = mu * h * ops.minus().apply(u);
        return ops.plus().apply(flux);
    }
    const Field flux = mu * h * ops.d_central.apply(u);
    return ops.d_central.apply(flux);
}

} // namespace sgn
