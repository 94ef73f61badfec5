#pragma once

#include "sgn/sbp.hpp"

namespace sgn {

/// Artificial viscosity settings. `order` 0 means "take it from the operators".
struct AvConfig {
    bool enabled = false;
    double c = 1.0;
    int order = 0;
};

/// mu = c * dx^p / p
double av_coefficient(double dx, int p, double c);

/// F = D(mu h Du) (central) or D+(mu h D-u) (upwind). Enters as h u_t += F.
Field av_term(const OperatorSet& ops, double mu, const Field& h, const Field& u, OperatorMode mode);

} // namespace sgn
