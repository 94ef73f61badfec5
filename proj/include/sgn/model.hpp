#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgn/sbp.hpp"

namespace sgn {

/// Concatenated nodal fields, e.g. [h; u] or [h; u; w; eta].
using State = Eigen::VectorXd;

enum class ModelKind { swe, sgn_hyperbolic, sgn_original };
enum class Variant { flat, variable, mild, full };

std::string to_string(ModelKind k);
std::string to_string(Variant v);
ModelKind parse_model_kind(const std::string& s);
Variant parse_variant(const std::string& s);

struct ModelParams {
    double g = 9.81;
    double lambda = 500.0;
};

/// Forcing terms for manufactured solutions, one field per equation, in the
/// form the equations are written (the momentum-type ones multiplied by h).
using SourceFn = std::function<void(double t, std::vector<Field>& sources)>;

class Model {
public:
    Model(OperatorSet ops, Field b, ModelParams params, OperatorMode mode);
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual std::vector<std::string> field_names() const = 0;
    std::size_t n_fields() const { return field_names().size(); }
    std::size_t n() const { return ops_.grid.n; }

    virtual void rhs(double t, const State& y, State& dy) = 0;
    virtual double energy(const State& y) const = 0;
    /// M^{-1} times the gradient of the discrete total energy.
    virtual State energy_gradient(const State& y) const = 0;
    /// Builds a full state from h and u (auxiliary fields set by the model).
    virtual State initial_state(const Field& h, const Field& u) const;

    double mass(const State& y) const;
    double momentum(const State& y) const;

    const OperatorSet& ops() const { return ops_; }
    const Field& bathymetry() const { return b_; }
    const ModelParams& params() const { return params_; }
    OperatorMode mode() const { return mode_; }

    void set_viscosity(double mu) { mu_ = mu; }
    double viscosity() const { return mu_; }
    void set_source(SourceFn source) { source_ = std::move(source); }

    Field field(const State& y, std::size_t k) const { return y.segment(k * n(), n()).array(); }

protected:
    OperatorSet ops_;
    Field b_;
    ModelParams params_;
    OperatorMode mode_;
    double mu_ = 0.0;
    SourceFn source_;
};

std::unique_ptr<Model> make_model(ModelKind kind, Variant variant, const OperatorSet& ops, const Field& b,
                                  ModelParams params, OperatorMode mode);

/// Rate of change of 1^T M E along dy, and the matching magnitude scale
/// sum_i w_i |grad_i| |dy_i| used to judge round-off.
struct InvariantRates {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
    double energy_scale = 0.0;
    double momentum_scale = 0.0;
};

InvariantRates invariant_rates(const Model& model, const State& y, const State& dy);

} // namespace sgn
