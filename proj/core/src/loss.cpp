#include "risksvm/loss.hpp"

#include <stdexcept>

namespace risksvm {

const char* to_string(LossKind kind) {
    switch (kind) {
    case LossKind::exp_val: return "exp_val";
    case LossKind::huber: return "huber";
    case LossKind::joint_cvar: return "joint_cvar";
    case LossKind::asym_risk: return "asym_risk";
    case LossKind::one_cvar: return "one_cvar";
    case LossKind::risk_cvar: return "risk_cvar";
    case LossKind::two_risk: return "two_risk";
    case LossKind::two_cvar: return "two_cvar";
    }
    return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "exp_val") return LossKind::exp_val;
    if (name == "huber") return LossKind::huber;
    if (name == "joint_cvar") return LossKind::joint_cvar;
    if (name == "asym_risk") return LossKind::asym_risk;
    if (name == "one_cvar") return LossKind::one_cvar;
    if (name == "risk_cvar") return LossKind::risk_cvar;
    if (name == "two_risk") return LossKind::two_risk;
    if (name == "two_cvar") return LossKind::two_cvar;
    throw std::invalid_argument("unknown loss name: " + name);
}

namespace {

double require(const std::optional<double>& value, const char* name,
               double lo, double hi, bool open) {
    if (!value) {
        throw std::invalid_argument(std::string("missing required parameter ") + name);
    }
    const bool ok = open ? (*value > lo && *value < hi)
                         : (*value >= lo && *value <= hi);
    if (!ok) {
        throw std::invalid_argument(std::string("parameter ") + name + " out of range");
    }
    return *value;
}

} // namespace

void LossSpec::validate() const {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("delta must be positive");
    }
    if (kappa < 0.0 || kappa > 1.0) {
        throw std::invalid_argument("kappa must lie in [0, 1]");
    }
    switch (kind) {
    case LossKind::exp_val:
    case LossKind::huber:
        return;
    case LossKind::joint_cvar:
        require(alpha, "alpha", 0.0, 1.0, true);
        require(beta, "beta", 0.0, 1.0, false);
        return;
    case LossKind::asym_risk:
        require(lambda, "lambda", 0.0, 1.0, true);
        return;
    case LossKind::one_cvar:
        require(lambda, "lambda", 0.0, 1.0, true);
        require(alpha2, "alpha2", 0.0, 1.0, true);
        return;
    case LossKind::risk_cvar:
        require(lambda, "lambda", 0.0, 1.0, true);
        require(alpha2, "alpha2", 0.0, 1.0, true);
        require(beta, "beta", 0.0, 1.0, false);
        return;
    case LossKind::two_risk:
        require(lambda, "lambda", 0.0, 1.0, true);
        return;
    case LossKind::two_cvar:
        require(lambda, "lambda", 0.0, 1.0, true);
        require(alpha1, "alpha1", 0.0, 1.0, true);
        require(alpha2, "alpha2", 0.0, 1.0, true);
        require(beta1, "beta1", 0.0, 1.0, false);
        require(beta2, "beta2", 0.0, 1.0, false);
        return;
    }
    throw std::logic_error("unknown loss kind");
}

ClassRisks per_class_risks(const LossSpec& spec) {
    spec.validate();
    switch (spec.kind) {
    case LossKind::exp_val:
        return {RiskSpec::expectation(), RiskSpec::expectation(), 1.0, 1.0};
    case LossKind::huber:
        throw std::invalid_argument("huber is not a coherent-risk objective");
    case LossKind::joint_cvar:
        // Only the separable expectation part; the AVaR pools both classes.
        return {RiskSpec::expectation(), RiskSpec::expectation(), *spec.beta, *spec.beta};
    case LossKind::asym_risk:
        return {RiskSpec::expectation(), RiskSpec::mean_semideviation(spec.kappa),
                *spec.lambda, 1.0 - *spec.lambda};
    case LossKind::one_cvar:
        return {RiskSpec::mean_semideviation(spec.kappa),
                RiskSpec::average_value_at_risk(*spec.alpha2),
                *spec.lambda, 1.0 - *spec.lambda};
    case LossKind::risk_cvar:
        return {RiskSpec::mean_semideviation(spec.kappa),
                RiskSpec::convex_combo(*spec.beta, *spec.alpha2),
                *spec.lambda, 1.0 - *spec.lambda};
    case LossKind::two_risk:
        return {RiskSpec::mean_semideviation(spec.kappa),
                RiskSpec::mean_semideviation(spec.kappa),
                *spec.lambda, 1.0 - *spec.lambda};
    case LossKind::two_cvar:
        return {RiskSpec::convex_combo(*spec.beta1, *spec.alpha1),
                RiskSpec::convex_combo(*spec.beta2, *spec.alpha2),
                *spec.lambda, 1.0 - *spec.lambda};
    }
    throw std::logic_error("unknown loss kind");
}

} // namespace risksvm
