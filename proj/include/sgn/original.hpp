#pragma once

#include "sgn/elliptic.hpp"
#include "sgn/model.hpp"

namespace sgn {

struct SgnState {
    Field h;
    Field u;
    Field b;
    double g = 9.81;
    Variant variant = Variant::flat;
    OperatorMode mode = OperatorMode::central;
};

/// Non-hydrostatic pressure split into the part differentiated with D+ (p_plus)
/// and the part differentiated with D (p_zero). In central mode D+ = D.
struct Pressure {
    Field p_plus;
    Field p_zero;
};

/// Flat-bottom pressure; central callers may use p_plus + p_zero as the single p.
Pressure pressure_flat(const SgnState& s, const OperatorSet& ops);
/// Pressure including the mild/full bathymetry terms (Db = D b).
Pressure pressure(const SgnState& s, const OperatorSet& ops, const Field& db);

struct SgnTendency {
    Field h_t;
    Field u_t;
};

/// Right-hand side y of A u_t = y.
Field momentum_rhs(const SgnState& s, const OperatorSet& ops, const Field* forcing = nullptr);

SpdOperator assemble_for(const SgnState& s, const OperatorSet& ops);

SgnTendency rhs_original(const SgnState& s, const OperatorSet& ops, EllipticSolver& elliptic,
                         const Field* forcing = nullptr);

double energy_original(const SgnState& s, const OperatorSet& ops);
double momentum(const Field& h, const Field& u, const MassMatrix& mass);

class OriginalModel : public Model {
public:
    OriginalModel(OperatorSet ops, Field b, ModelParams params, OperatorMode mode, Variant variant,
                  SolveMethod method = SolveMethod::direct);

    std::string name() const override { return "sgn-original/" + to_string(variant_); }
    std::vector<std::string> field_names() const override { return {"h", "u"}; }
    void rhs(double t, const State& y, State& dy) override;
    double energy(const State& y) const override;
    State energy_gradient(const State& y) const override;

    Variant variant() const { return variant_; }

private:
    SgnState unpack(const State& y) const;
    Variant variant_;
    EllipticSolver solver_;
};

} // namespace sgn
