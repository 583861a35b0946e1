#pragma once

#include "risksvm/build_qp.hpp"

namespace risksvm {

// Every risk-shaped training loss is, at its optimum, an expectation of the
// hinge slacks under some reweighting of the training points: the risk
// terms' dual representations pick out a density at the trained slack
// distribution, and folding in the scalarization weights yields a
// probability measure mu over the training set for which the trained
// classifier also minimizes plain mu-weighted expected hinge loss (with the
// regularization weight rescaled by the scalarization mass). The density is
// read off the training QP's multipliers, which select the certifying
// member of the dual representation even where the risk term is kinked.
struct ImpliedMeasure {
    Eigen::VectorXd mu0; // one weight per class-0 training point, in-class order
    Eigen::VectorXd mu1; // together with mu0 sums to 1
    // Dual densities the weights were built from. For separable losses these
    // are per-class densities with respect to the uniform in-class weights;
    // for the pooled-tail loss they are the pooled density's restriction to
    // each class, with respect to uniform weights over all points.
    Eigen::VectorXd zeta0;
    Eigen::VectorXd zeta1;
    double w0 = 0.0;   // scalarization weight of the class-0 term
    double w1 = 0.0;
    double mass = 1.0; // unnormalized total weight; mu = raw weights / mass
};

// Extracts the measure from a trained model's slack prices. Requires an
// optimal solve with recorded prices; the quadratic slack loss has no such
// representation and is rejected with std::invalid_argument.
ImpliedMeasure implied_weights(const TrainedModel& model);

struct EquivalenceCheck {
    ImpliedMeasure measure;
    double model_value = 0.0;      // reweighted objective at the trained solution
    double reweighted_value = 0.0; // optimum of the reweighted expectation problem
    double gap = 0.0;              // |model_value - reweighted_value|
};

// Re-solves the mu-weighted expectation problem (with regularization
// delta / mass) and reports how far the trained solution is from its
// optimum. A vanishing gap certifies that the risk-shaped loss acted as an
// expectation under the implied measure.
EquivalenceCheck verify_equivalence(const TrainedModel& model,
                                    const LabeledDataset& data,
                                    const SolverSettings& settings = {});

} // namespace risksvm
