#pragma once

#include "risksvm/empirical_distribution.hpp"

#include <vector>

namespace risksvm {

enum class RiskKind {
    expectation,
    value_at_risk,      // reporting only; not coherent, excluded from training losses
    avar,               // average value at risk of the worst alpha probability mass
    mean_semideviation, // E[Z] + kappa * E[(Z - E[Z])_+^p]^(1/p), p = 1 only
    convex_combo,       // beta * E[Z] + (1 - beta) * AVaR_alpha(Z)
};

struct RiskSpec {
    RiskKind kind = RiskKind::expectation;
    double alpha = 1.0; // tail mass in (0, 1] for avar; (0, 1) for value_at_risk
    double beta = 1.0;  // expectation weight in convex_combo
    double kappa = 1.0; // semideviation penalty in [0, 1]
    int order = 1;      // semideviation order; only 1 is supported

    static RiskSpec expectation();
    static RiskSpec value_at_risk(double alpha);
    static RiskSpec average_value_at_risk(double alpha);
    static RiskSpec mean_semideviation(double kappa, int order = 1);
    static RiskSpec convex_combo(double beta, double alpha);
};

double expectation(const EmpiricalDistribution& dist);

// Left (1 - alpha)-quantile of the weighted empirical CDF:
// inf{ eta : F(eta) >= 1 - alpha }.
double value_at_risk(const EmpiricalDistribution& dist, double alpha);

// Mean of the worst alpha probability mass, splitting the boundary atom
// fractionally. alpha = 1 gives the expectation.
double avar_sorted(const EmpiricalDistribution& dist, double alpha);

struct AvarVariational {
    double value = 0.0;
    double minimizer = 0.0; // largest breakpoint attaining the minimum
};

// Evaluates inf_eta { eta + E[(X - eta)_+] / alpha } by scanning the sample
// breakpoints. The value matches avar_sorted; the minimizer interval's right
// endpoint is returned.
AvarVariational avar_variational(const EmpiricalDistribution& dist, double alpha);

double mean_semideviation(const EmpiricalDistribution& dist, double kappa, int order = 1);

double evaluate(const RiskSpec& spec, const EmpiricalDistribution& dist);

// A maximizing density of the dual representation rho(Z) = max over the
// measure set of <zeta, Z>: zeta_j >= 0, sum_j w_j zeta_j = 1, and
// sum_j w_j zeta_j Z_j = evaluate(spec, dist). Value-at-risk has no such
// representation and is rejected.
std::vector<double> subgradient_density(const RiskSpec& spec, const EmpiricalDistribution& dist);

} // namespace risksvm
