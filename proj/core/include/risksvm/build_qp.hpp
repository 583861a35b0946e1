#pragma once

#include "risksvm/dataset.hpp"
#include "risksvm/geometry.hpp"
#include "risksvm/loss.hpp"
#include "risksvm/qp.hpp"
#include "risksvm/solver.hpp"

namespace risksvm {

struct TrainedModel {
    LinearClassifier classifier;
    Eigen::VectorXd slack0; // one hinge slack per class-0 training point
    Eigen::VectorXd slack1;
    // Marginal price the optimum pays per unit of extra slack on each
    // training point: the multiplier of its margin row plus that of its
    // slack sign bound. Summed per class this is the class's weight in the
    // objective; rescaled it is the density behind the implied measure.
    // Empty when the solve carries no multipliers (hand-injected iterates).
    Eigen::VectorXd price0;
    Eigen::VectorXd price1;
    double objective = 0.0;
    LossSpec spec;
    SolveStatus status = SolveStatus::max_iterations;
};

// Emits the QP for a loss formulation on a dataset. Margin rows come first
// (class 0, then class 1), then slack bounds, then the epigraph rows of any
// risk terms. Variable blocks are named in var_map: "v", "gamma", "z0", "z1",
// and per formulation "y0"/"y1" (semideviation or tail exceedances),
// "t0"/"t1"/"t" (value-at-risk epigraph shifts), or "a0"/"b0"/"a1"/"b1"
// (the quadratic/linear slack split). Degenerate blocks are omitted: a class
// whose expectation weight is 1 gets no AVaR block, kappa = 0 drops
// semideviation blocks.
QuadraticProgram build(const LossSpec& spec, const LabeledDataset& data);

// Reads (v, gamma) out of a solved QP and stores the hinge slacks the
// classifier actually realizes on each training point (the QP's slack
// variables may sit anywhere the objective is flat in them, e.g. below a
// value-at-risk shift, so they are recomputed from the scores). The raw
// slack block is still audited against the margin rows and throws
// SolverError on a violation beyond solver precision.
//
// The Solution overload also reads the per-point slack prices off the row
// multipliers and skips the audit when the solve did not report optimal:
// an unconverged iterate is returned as-is for the caller to judge by its
// status. The x-only overload always audits and leaves the prices empty.
TrainedModel extract_solution(const QuadraticProgram& qp, const Solution& sol,
                              const LossSpec& spec,
                              const LabeledDataset& data);
TrainedModel extract_solution(const QuadraticProgram& qp,
                              const Eigen::VectorXd& x_opt,
                              const LossSpec& spec,
                              const LabeledDataset& data);

// Convenience wrapper: build, solve, extract.
TrainedModel train(const LossSpec& spec, const LabeledDataset& data,
                   const SolverSettings& settings = {});

} // namespace risksvm
