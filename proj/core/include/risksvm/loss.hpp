#pragma once

#include "risksvm/risk.hpp"

#include <optional>
#include <string>

namespace risksvm {

// The eight named training losses. Class 0 and class 1 refer to the label
// values; lambda weights the class-0 risk term and (1 - lambda) the class-1
// term wherever a formulation has per-class weights.
enum class LossKind {
    exp_val,    // class-averaged hinge slacks, no risk shaping
    huber,      // quadratic-then-linear slack cost, class-averaged
    joint_cvar, // beta * E + (1 - beta) * AVaR_alpha over the pooled slacks
    asym_risk,  // E on class 0 vs mean-semideviation on class 1
    one_cvar,   // mean-semideviation on class 0 vs AVaR_alpha2 on class 1
    risk_cvar,  // mean-semideviation vs beta * E + (1 - beta) * AVaR_alpha2
    two_risk,   // mean-semideviation on both classes
    two_cvar,   // E/AVaR mix on both classes with (beta1, alpha1), (beta2, alpha2)
};

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct LossSpec {
    LossKind kind = LossKind::exp_val;
    std::optional<double> lambda; // class-0 weight, in (0, 1)
    std::optional<double> alpha;  // pooled AVaR tail mass (joint_cvar)
    std::optional<double> alpha1; // class-0 AVaR tail mass (two_cvar)
    std::optional<double> alpha2; // class-1 AVaR tail mass
    std::optional<double> beta;   // expectation weight (joint_cvar, risk_cvar)
    std::optional<double> beta1;  // class-0 expectation weight (two_cvar)
    std::optional<double> beta2;  // class-1 expectation weight (two_cvar)
    double kappa = 1.0;           // semideviation penalty
    double delta = 1e-2;          // ||v||^2 regularization weight

    // Throws std::invalid_argument when a parameter the formulation uses is
    // missing or out of range. Unused parameters are ignored.
    void validate() const;

    bool risk_averse() const {
        return kind != LossKind::exp_val && kind != LossKind::huber;
    }
};

// The scalarized per-class risk measures a formulation minimizes, with their
// weights: objective = w0 * rho0(Z0) + w1 * rho1(Z1) + delta * ||v||^2.
// joint_cvar does not decompose per class this way (its AVaR pools both
// classes) and reports the class-averaged expectation components only; use
// LossSpec::kind to special-case it.
struct ClassRisks {
    RiskSpec rho0;
    RiskSpec rho1;
    double w0 = 1.0;
    double w1 = 1.0;
};

// Defined for every kind except huber (which is not a coherent-risk
// objective); throws std::invalid_argument for huber.
ClassRisks per_class_risks(const LossSpec& spec);

} // namespace risksvm
