#pragma once

#include "sgn/model.hpp"

namespace sgn {

struct SweState {
    Field h;
    Field u;
    Field b;
    double g = 9.81;
};

struct SweTendency {
    Field h_t;
    Field u_t;
};

SweTendency rhs_swe(const SweState& s, const OperatorSet& ops, const Field* momentum_forcing = nullptr);
double energy_swe(const SweState& s, const OperatorSet& ops);

class SweModel : public Model {
public:
    SweModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode);

    std::string name() const override { return "swe"; }
    std::vector<std::string> field_names() const override { return {"h", "u"}; }
    void rhs(double t, const State& y, State& dy) override;
    double energy(const State& y) const override;
    State energy_gradient(const State& y) const override;
};

} // namespace sgn
