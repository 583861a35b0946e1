#include "risksvm/implied.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace risksvm {

ImpliedMeasure implied_weights(const TrainedModel& model) {
    const LossSpec& spec = model.spec;
    if (spec.kind == LossKind::huber) {
        throw std::invalid_argument(
            "the quadratic slack loss has no implied measure");
    }
    if (model.status != SolveStatus::optimal) {
        throw std::runtime_error("implied measure needs an optimal solve");
    }
    spec.validate();

    const auto m0 = model.slack0.size();
    const auto m1 = model.slack1.size();
    if (m0 == 0 || m1 == 0) {
        throw std::invalid_argument("model has an empty class");
    }
    if (model.price0.size() != m0 || model.price1.size() != m1) {
        throw std::invalid_argument("model has no recorded slack prices");
    }

    ImpliedMeasure out;
    if (spec.kind == LossKind::joint_cvar) {
        out.w0 = out.w1 = *spec.beta;
        out.mass = 1.0 + *spec.beta;
    } else {
        const ClassRisks risks = per_class_risks(spec);
        out.w0 = risks.w0;
        out.w1 = risks.w1;
        out.mass = risks.w0 + risks.w1;
    }

    // The slack prices are the optimal measure, up to the total objective
    // mass. Reading them off the multipliers (rather than rebuilding a
    // density from the slack values) keeps the selection the optimum
    // actually certifies when the risk term is kinked there — slack ties at
    // a tail boundary, or a whole class sitting at zero.
    out.mu0 = model.price0 / out.mass;
    out.mu1 = model.price1 / out.mass;
    const double total = out.mu0.sum() + out.mu1.sum();
    const double low = std::min(out.mu0.minCoeff(), out.mu1.minCoeff());
    if (std::abs(total - 1.0) > 1e-5 || low < -1e-8) {
        throw std::runtime_error("implied weights are not a probability measure");
    }
    out.mu0 = out.mu0.cwiseMax(0.0) / total;
    out.mu1 = out.mu1.cwiseMax(0.0) / total;

    // Densities with respect to the measures the risk terms average over:
    // per-class uniform weights, except the pooled tail term, whose density
    // lives on the uniform measure over both classes together.
    if (spec.kind == LossKind::joint_cvar) {
        const double beta = *spec.beta;
        const double pooled_n = static_cast<double>(m0 + m1);
        if (beta < 1.0) {
            const double scale = pooled_n / (1.0 - beta);
            out.zeta0 = ((out.mu0.array() * out.mass -
                          beta / static_cast<double>(m0)) *
                         scale)
                            .max(0.0)
                            .matrix();
            out.zeta1 = ((out.mu1.array() * out.mass -
                          beta / static_cast<double>(m1)) *
                         scale)
                            .max(0.0)
                            .matrix();
        } else {
            out.zeta0 = Eigen::VectorXd::Zero(m0);
            out.zeta1 = Eigen::VectorXd::Zero(m1);
        }
    } else {
        out.zeta0 = out.mu0 * (out.mass * static_cast<double>(m0) / out.w0);
        out.zeta1 = out.mu1 * (out.mass * static_cast<double>(m1) / out.w1);
    }
    return out;
}

namespace {

// The mu-weighted expectation problem: minimize
//   sum_j mu_j z_j + (delta / mass) ||v||^2
// over the usual margin constraints with nonnegative slacks.
QuadraticProgram build_reweighted(const ImpliedMeasure& measure,
                                  const LabeledDataset& data,
                                  double delta) {
    const Eigen::Index n = data.features.cols();
    const auto m = static_cast<Eigen::Index>(data.rows());
    const Eigen::Index nvar = n + 1 + m; // v, gamma, one slack per record

    QuadraticProgram qp;
    qp.var_map.emplace("v", VarRange{0, static_cast<std::size_t>(n)});
    qp.var_map.emplace("gamma", VarRange{static_cast<std::size_t>(n), 1});
    qp.var_map.emplace("z", VarRange{static_cast<std::size_t>(n) + 1,
                                     static_cast<std::size_t>(m)});

    std::vector<Eigen::Triplet<double>> p_trip, a_trip;
    qp.q = Eigen::VectorXd::Zero(nvar);
    for (Eigen::Index i = 0; i < n; ++i) {
        p_trip.emplace_back(i, i, 2.0 * delta / measure.mass);
    }

    std::vector<double> lo, hi;
    Eigen::Index next0 = 0, next1 = 0, row = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
        const int label = data.labels[static_cast<std::size_t>(r)];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = data.features(r, i);
            if (x != 0.0) {
                a_trip.emplace_back(row, i, x);
            }
        }
        a_trip.emplace_back(row, n, -1.0);
        if (label == 0) {
            a_trip.emplace_back(row, n + 1 + r, -1.0);
            lo.push_back(-kInf);
            hi.push_back(-1.0);
            qp.q[n + 1 + r] = measure.mu0[next0++];
        } else {
            a_trip.emplace_back(row, n + 1 + r, 1.0);
            lo.push_back(1.0);
            hi.push_back(kInf);
            qp.q[n + 1 + r] = measure.mu1[next1++];
        }
        ++row;
    }
    for (Eigen::Index r = 0; r < m; ++r) {
        a_trip.emplace_back(row, n + 1 + r, 1.0);
        lo.push_back(0.0);
        hi.push_back(kInf);
        ++row;
    }

    qp.P.resize(nvar, nvar);
    qp.P.setFromTriplets(p_trip.begin(), p_trip.end());
    qp.A.resize(row, nvar);
    qp.A.setFromTriplets(a_trip.begin(), a_trip.end());
    qp.l = Eigen::Map<const Eigen::VectorXd>(lo.data(), row);
    qp.u = Eigen::Map<const Eigen::VectorXd>(hi.data(), row);
    return qp;
}

} // namespace

EquivalenceCheck verify_equivalence(const TrainedModel& model,
                                    const LabeledDataset& data,
                                    const SolverSettings& settings) {
    EquivalenceCheck check;
    check.measure = implied_weights(model);

    const auto m0 = static_cast<Eigen::Index>(data.count(0));
    const auto m1 = static_cast<Eigen::Index>(data.count(1));
    if (m0 != check.measure.mu0.size() || m1 != check.measure.mu1.size()) {
        throw std::invalid_argument("dataset does not match the trained model");
    }
    if (data.features.cols() != model.classifier.v.size()) {
        throw std::invalid_argument("dataset does not match the trained model");
    }

    const double reg = model.spec.delta / check.measure.mass;
    check.model_value = check.measure.mu0.dot(model.slack0) +
        check.measure.mu1.dot(model.slack1) +
        reg * model.classifier.v.squaredNorm();

    const QuadraticProgram qp =
        build_reweighted(check.measure, data, model.spec.delta);
    const Solution solved = solve(qp, settings);
    if (solved.status != SolveStatus::optimal) {
        throw SolverError("reweighted expectation problem did not solve");
    }
    check.reweighted_value = qp.objective(solved.x);
    check.gap = std::abs(check.model_value - check.reweighted_value);
    return check;
}

} // namespace risksvm
