#pragma once

#include "risksvm/qp.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace risksvm {

// Thrown when optimization itself fails (infeasible or unusable iterate),
// as opposed to bad inputs.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveStatus {
    optimal,
    max_iterations,
    infeasible,
};

const char* to_string(SolveStatus status);

struct SolverSettings {
    double eps_abs = 1e-8;
    double eps_rel = 1e-8;
    int max_iterations = 50000;
    bool scaling = true;        // Ruiz equilibration of P, q, A
    bool adaptive_rho = true;
    bool polish = true;         // active-set KKT refinement after convergence
    double rho = 0.1;           // initial step; equality rows use rho * 1e3
    double sigma = 1e-6;        // proximal regularization on the x block
    double relaxation = 1.6;    // over-relaxation in (0, 2)
    int check_interval = 25;    // iterations between convergence checks
    double eps_infeasible = 1e-9;
    std::ostream* diagnostics = nullptr; // per-checkpoint log lines when set
};

struct Solution {
    Eigen::VectorXd x;
    Eigen::VectorXd y; // one multiplier per row; <= 0 at lower bounds, >= 0 at upper
    SolveStatus status = SolveStatus::max_iterations;
    int iterations = 0;
    double primal_residual = kInf;
    double dual_residual = kInf;
    double objective = kInf;
    bool polished = false;
    std::vector<double> checkpoint_objectives; // objective trace at check intervals
};

// Operator-splitting (ADMM) solver for the two-sided QP of qp.hpp. On
// SolveStatus::optimal the iterate satisfies the usual primal/dual residual
// bounds; infeasibility is declared only via divergence certificates on the
// iterate differences, never by iteration count alone. Deterministic: the
// same problem and settings always produce the same iterates.
Solution solve(const QuadraticProgram& qp, const SolverSettings& settings = {});

struct KktResiduals {
    double primal = 0.0;           // worst bound violation of A x
    double dual = 0.0;             // || P x + q + A' y ||_inf
    double complementarity = 0.0;  // worst |y_i| * distance-to-active-bound
};

KktResiduals kkt_residuals(const QuadraticProgram& qp,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);

} // namespace risksvm
