#pragma once

#include "sgn/model.hpp"

namespace sgn {

struct HypState {
    Field h;
    Field u;
    Field w;
    Field eta;
    Field b;
    double g = 9.81;
    double lambda = 500.0;
};

struct HypTendency {
    Field h_t;
    Field u_t;
    Field w_t;
    Field eta_t;
};

/// Optional additive terms for the four equations as written (u and w equations times h).
struct HypForcing {
    const Field* h = nullptr;
    const Field* hu = nullptr;
    const Field* hw = nullptr;
    const Field* eta = nullptr;
};

struct AuxiliaryFields {
    Field eta;
    Field w;
};

/// eta = h, w = -h Du
AuxiliaryFields init_auxiliary(const Field& h, const Field& u, const OperatorSet& ops);

/// Ignores s.b.
HypTendency rhs_hyperbolic_flat(const HypState& s, const OperatorSet& ops, const HypForcing& f = {});
HypTendency rhs_hyperbolic_variable(const HypState& s, const OperatorSet& ops, const HypForcing& f = {});
double energy_hyperbolic(const HypState& s, const OperatorSet& ops);

class HyperbolicModel : public Model {
public:
    HyperbolicModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode, bool variable);

    std::string name() const override { return variable_ ? "sgn-hyperbolic/variable" : "sgn-hyperbolic/flat"; }
    std::vector<std::string> field_names() const override { return {"h", "u", "w", "eta"}; }
    void rhs(double t, const State& y, State& dy) override;
    double energy(const State& y) const override;
    State energy_gradient(const State& y) const override;
    State initial_state(const Field& h, const Field& u) const override;

private:
    HypState unpack(const State& y) const;
    bool variable_;
};

} // namespace sgn
