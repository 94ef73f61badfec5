#include "sgn/model.hpp"

#include <cmath>

#include "sgn/errors.hpp"
#include "sgn/hyperbolic.hpp"
#include "sgn/original.hpp"
#include "sgn/swe.hpp"

namespace sgn {

std::string to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::swe: return "swe";
    case ModelKind::sgn_hyperbolic: return "sgn-hyperbolic";
    case ModelKind::sgn_original: return "sgn-original";
    }
    return "unknown";
}

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::flat: return "flat";
    case Variant::variable: return "variable";
    case Variant::mild: return "mild";
    case Variant::full: return "full";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& s)
{
    if (s == "swe") {
        return ModelKind::swe;
    }
    if (s == "sgn-hyperbolic") {
        return ModelKind::sgn_hyperbolic;
    }
    if (s == "sgn-original") {
        return ModelKind::sgn_original;
    }
    throw InvalidArgument("unknown model '" + s + "' (expected swe, sgn-hyperbolic or sgn-original)");
}

Variant parse_variant(const std::string& s)
{
    if (s == "flat") {
        return Variant::flat;
    }
    if (s == "variable") {
        return Variant::variable;
    }
    if (s == "mild") {
        return Variant::mild;
    }
    if (s == "full") {
        return Variant::full;
    }
    throw InvalidArgument("unknown variant '" + s + "' (expected flat, variable, mild or full)");
}

Model::Model(OperatorSet ops, Field b, ModelParams params, OperatorMode mode)
    : ops_(std::move(ops)), b_(std::move(b)), params_(params), mode_(mode)
{
    if (static_cast<std::size_t>(b_.size()) != ops_.grid.n) {
        throw InvalidArgument("model: bathymetry length does not match grid");
    }
    if (mode_ == OperatorMode::upwind && !ops_.has_upwind()) {
        throw InvalidArgument("model: upwind mode requires upwind operators");
    }
    if (!(params_.g > 0.0)) {
        throw InvalidArgument("model: g must be positive");
    }
    if (params_.lambda < 0.0) {
        throw InvalidArgument("model: lambda must be non-negative");
    }
}

State Model::initial_state(const Field& h, const Field& u) const
{
    const std::size_t nn = n();
    State y(2 * nn);
    y.segment(0, nn) = h.matrix();
    y.segment(nn, nn) = u.matrix();
    return y;
}

double Model::mass(const State& y) const
{
    return quadrature(ops_.mass, field(y, 0));
}

double Model::momentum(const State& y) const
{
    return quadrature(ops_.mass, field(y, 0) * field(y, 1));
}

std::unique_ptr<Model> make_model(ModelKind kind, Variant variant, const OperatorSet& ops, const Field& b,
                                  ModelParams params, OperatorMode mode)
{
    switch (kind) {
    case ModelKind::swe:
        if (variant != Variant::flat && variant != Variant::variable) {
            throw InvalidArgument("swe supports the flat and variable variants");
        }
        return std::make_unique<SweModel>(ops, variant == Variant::flat ? Field(Field::Zero(b.size())) : b, params,
                                          mode);
    case ModelKind::sgn_hyperbolic:
        if (variant != Variant::flat && variant != Variant::variable) {
            throw InvalidArgument("sgn-hyperbolic supports the flat and variable variants");
        }
        return std::make_unique<HyperbolicModel>(ops, b, params, mode, variant == Variant::variable);
    case ModelKind::sgn_original:
        return std::make_unique<OriginalModel>(ops, b, params, mode, variant);
    }
    throw InvalidArgument("make_model: unknown model kind");
}

InvariantRates invariant_rates(const Model& model, const State& y, const State& dy)
{
    const std::size_t nn = model.n();
    const Field& w = model.ops().mass.weights;
    const State grad = model.energy_gradient(y);
    InvariantRates r;
    const Field h = model.field(y, 0);
    const Field u = model.field(y, 1);
    const Field ht = model.field(dy, 0);
    const Field ut = model.field(dy, 1);
    r.mass = (w * ht).sum();
    const Field mom = u * ht + h * ut;
    r.momentum = (w * mom).sum();
    r.momentum_scale = (w * ((u * ht).abs() + (h * ut).abs())).sum();
    for (std::size_t k = 0; k < model.n_fields(); ++k) {
        const Field g = grad.segment(k * nn, nn).array();
        const Field f = dy.segment(k * nn, nn).array();
        r.energy += (w * g * f).sum();
        r.energy_scale += (w * (g * f).abs()).sum();
    }
    return r;
}

} // namespace sgn
