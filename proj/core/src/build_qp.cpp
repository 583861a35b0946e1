#include "risksvm/build_qp.hpp"

#include <cassert>
#include <stdexcept>
#include <vector>

namespace risksvm {

namespace {

using Triplet = Eigen::Triplet<double>;

// Incremental assembly of the standard-form QP: variable blocks are claimed
// in order, rows appended with their bounds.
struct Assembler {
    std::vector<Triplet> p_trip;
    std::vector<Triplet> a_trip;
    std::vector<double> q;
    std::vector<double> lo;
    std::vector<double> hi;
    std::map<std::string, VarRange> vars;
    std::map<std::string, VarRange> rows;
    std::size_t nvar = 0;

    VarRange block(const std::string& name, std::size_t size) {
        VarRange r{nvar, size};
        vars.emplace(name, r);
        nvar += size;
        q.resize(nvar, 0.0);
        return r;
    }

    std::size_t add_row(double l, double u) {
        lo.push_back(l);
        hi.push_back(u);
        return lo.size() - 1;
    }

    // Names the rows appended between mark() and the call.
    std::size_t mark() const { return lo.size(); }

    void name_rows(const std::string& name, std::size_t from) {
        rows.emplace(name, VarRange{from, lo.size() - from});
    }

    void a_entry(std::size_t row, std::size_t col, double value) {
        a_trip.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
    }

    void p_diag(std::size_t col, double value) {
        p_trip.emplace_back(static_cast<int>(col), static_cast<int>(col), value);
    }

    QuadraticProgram finish() {
        QuadraticProgram qp;
        const auto n = static_cast<Eigen::Index>(nvar);
        const auto m = static_cast<Eigen::Index>(lo.size());
        qp.P.resize(n, n);
        qp.P.setFromTriplets(p_trip.begin(), p_trip.end());
        qp.A.resize(m, n);
        qp.A.setFromTriplets(a_trip.begin(), a_trip.end());
        qp.q = Eigen::Map<const Eigen::VectorXd>(q.data(), n);
        qp.l = Eigen::Map<const Eigen::VectorXd>(lo.data(), m);
        qp.u = Eigen::Map<const Eigen::VectorXd>(hi.data(), m);
        qp.var_map = vars;
        qp.row_map = rows;
        return qp;
    }
};

// What each class's objective contributes beyond the slack means:
// exp_weight multiplies mean(z); a semideviation block adds msd_weight *
// mean(y) with y_j >= z_j - mean(z); an AVaR block adds avar_weight *
// (t + mean(y) / alpha) with y_j >= z_j - t.
struct ClassPlan {
    double exp_weight = 0.0;
    bool msd = false;
    double msd_weight = 0.0;
    bool avar = false;
    double avar_weight = 0.0;
    double avar_alpha = 1.0;
};

struct BuildPlan {
    ClassPlan cls[2];
    bool pooled_avar = false;
    double pooled_weight = 0.0;
    double pooled_alpha = 1.0;
};

BuildPlan make_plan(const LossSpec& spec) {
    BuildPlan plan;
    switch (spec.kind) {
    case LossKind::exp_val:
    case LossKind::huber:
        plan.cls[0].exp_weight = 1.0;
        plan.cls[1].exp_weight = 1.0;
        return plan;
    case LossKind::joint_cvar: {
        const double beta = *spec.beta;
        plan.cls[0].exp_weight = beta;
        plan.cls[1].exp_weight = beta;
        if (beta < 1.0) {
            plan.pooled_avar = true;
            plan.pooled_weight = 1.0 - beta;
            plan.pooled_alpha = *spec.alpha;
        }
        return plan;
    }
    case LossKind::asym_risk: {
        const double lam = *spec.lambda;
        plan.cls[0].exp_weight = lam;
        plan.cls[1].exp_weight = 1.0 - lam;
        if (spec.kappa > 0.0) {
            plan.cls[1].msd = true;
            plan.cls[1].msd_weight = (1.0 - lam) * spec.kappa;
        }
        return plan;
    }
    case LossKind::one_cvar: {
        const double lam = *spec.lambda;
        plan.cls[0].exp_weight = lam;
        if (spec.kappa > 0.0) {
            plan.cls[0].msd = true;
            plan.cls[0].msd_weight = lam * spec.kappa;
        }
        plan.cls[1].avar = true;
        plan.cls[1].avar_weight = 1.0 - lam;
        plan.cls[1].avar_alpha = *spec.alpha2;
        return plan;
    }
    case LossKind::risk_cvar: {
        const double lam = *spec.lambda;
        const double beta = *spec.beta;
        plan.cls[0].exp_weight = lam;
        if (spec.kappa > 0.0) {
            plan.cls[0].msd = true;
            plan.cls[0].msd_weight = lam * spec.kappa;
        }
        plan.cls[1].exp_weight = (1.0 - lam) * beta;
        if (beta < 1.0) {
            plan.cls[1].avar = true;
            plan.cls[1].avar_weight = (1.0 - lam) * (1.0 - beta);
            plan.cls[1].avar_alpha = *spec.alpha2;
        }
        return plan;
    }
    case LossKind::two_risk: {
        const double lam = *spec.lambda;
        plan.cls[0].exp_weight = lam;
        plan.cls[1].exp_weight = 1.0 - lam;
        if (spec.kappa > 0.0) {
            plan.cls[0].msd = true;
            plan.cls[0].msd_weight = lam * spec.kappa;
            plan.cls[1].msd = true;
            plan.cls[1].msd_weight = (1.0 - lam) * spec.kappa;
        }
        return plan;
    }
    case LossKind::two_cvar: {
        const double lam = *spec.lambda;
        const double w[2] = {lam, 1.0 - lam};
        const double beta[2] = {*spec.beta1, *spec.beta2};
        const double alpha[2] = {*spec.alpha1, *spec.alpha2};
        for (int c = 0; c < 2; ++c) {
            plan.cls[c].exp_weight = w[c] * beta[c];
            if (beta[c] < 1.0) {
                plan.cls[c].avar = true;
                plan.cls[c].avar_weight = w[c] * (1.0 - beta[c]);
                plan.cls[c].avar_alpha = alpha[c];
            }
        }
        return plan;
    }
    }
    throw std::logic_error("unknown loss kind");
}

} // namespace

QuadraticProgram build(const LossSpec& spec, const LabeledDataset& data) {
    spec.validate();

    std::vector<std::size_t> idx[2];
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const int label = data.labels[r];
        if (label != 0 && label != 1) {
            throw std::invalid_argument("labels must be 0 or 1");
        }
        idx[label].push_back(r);
    }
    const std::size_t m[2] = {idx[0].size(), idx[1].size()};
    if (m[0] == 0 || m[1] == 0) {
        throw std::invalid_argument("both classes must be nonempty");
    }
    const std::size_t n = data.cols();
    const BuildPlan plan = make_plan(spec);
    const bool huber = spec.kind == LossKind::huber;

    Assembler as;
    const VarRange v = as.block("v", n);
    const VarRange gamma = as.block("gamma", 1);

    VarRange z[2], a[2], bvar[2], y[2], t[2];
    for (int c = 0; c < 2; ++c) {
        const std::string suffix = c == 0 ? "0" : "1";
        if (huber) {
            a[c] = as.block("a" + suffix, m[c]);
            bvar[c] = as.block("b" + suffix, m[c]);
        } else {
            z[c] = as.block("z" + suffix, m[c]);
        }
    }
    for (int c = 0; c < 2; ++c) {
        const std::string suffix = c == 0 ? "0" : "1";
        assert(!(plan.cls[c].msd && plan.cls[c].avar));
        if (plan.cls[c].msd || plan.cls[c].avar) {
            y[c] = as.block("y" + suffix, m[c]);
        }
        if (plan.cls[c].avar) {
            t[c] = as.block("t" + suffix, 1);
        }
    }
    VarRange t_pool, y_pool;
    if (plan.pooled_avar) {
        t_pool = as.block("t", 1);
        y_pool = as.block("y", m[0] + m[1]);
    }

    // Objective: delta * ||v||^2 plus the plan's linear terms. The QP stores
    // (1/2) x'Px, hence the factor 2.
    for (std::size_t j = 0; j < n; ++j) {
        as.p_diag(v.offset + j, 2.0 * spec.delta);
    }
    for (int c = 0; c < 2; ++c) {
        const double inv_m = 1.0 / static_cast<double>(m[c]);
        if (huber) {
            for (std::size_t j = 0; j < m[c]; ++j) {
                as.p_diag(a[c].offset + j, 2.0 * inv_m);
                as.q[bvar[c].offset + j] = 2.0 * inv_m;
            }
            continue;
        }
        for (std::size_t j = 0; j < m[c]; ++j) {
            as.q[z[c].offset + j] = plan.cls[c].exp_weight * inv_m;
        }
        if (plan.cls[c].msd) {
            for (std::size_t j = 0; j < m[c]; ++j) {
                as.q[y[c].offset + j] = plan.cls[c].msd_weight * inv_m;
            }
        }
        if (plan.cls[c].avar) {
            as.q[t[c].offset] = plan.cls[c].avar_weight;
            const double coeff = plan.cls[c].avar_weight /
                (plan.cls[c].avar_alpha * static_cast<double>(m[c]));
            for (std::size_t j = 0; j < m[c]; ++j) {
                as.q[y[c].offset + j] = coeff;
            }
        }
    }
    if (plan.pooled_avar) {
        as.q[t_pool.offset] = plan.pooled_weight;
        const double coeff = plan.pooled_weight /
            (plan.pooled_alpha * static_cast<double>(m[0] + m[1]));
        for (std::size_t j = 0; j < m[0] + m[1]; ++j) {
            as.q[y_pool.offset + j] = coeff;
        }
    }

    // Margin rows: class 0 scores must sit at or below -1 after slack relief,
    // class 1 at or above +1.
    for (int c = 0; c < 2; ++c) {
        const double slack_sign = c == 0 ? -1.0 : 1.0;
        const std::size_t first = as.mark();
        for (std::size_t j = 0; j < m[c]; ++j) {
            const auto row = as.add_row(c == 0 ? -kInf : 1.0, c == 0 ? -1.0 : kInf);
            const auto record = static_cast<Eigen::Index>(idx[c][j]);
            for (std::size_t f = 0; f < n; ++f) {
                const double value = data.features(record, static_cast<Eigen::Index>(f));
                if (value != 0.0) {
                    as.a_entry(row, v.offset + f, value);
                }
            }
            as.a_entry(row, gamma.offset, -1.0);
            if (huber) {
                as.a_entry(row, a[c].offset + j, slack_sign);
                as.a_entry(row, bvar[c].offset + j, slack_sign);
            } else {
                as.a_entry(row, z[c].offset + j, slack_sign);
            }
        }
        as.name_rows(c == 0 ? "margin0" : "margin1", first);
    }

    // Slack bounds.
    for (int c = 0; c < 2; ++c) {
        const std::string suffix = c == 0 ? "0" : "1";
        if (huber) {
            std::size_t first = as.mark();
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, 1.0);
                as.a_entry(row, a[c].offset + j, 1.0);
            }
            as.name_rows("a" + suffix, first);
            first = as.mark();
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, bvar[c].offset + j, 1.0);
            }
            as.name_rows("b" + suffix, first);
        } else {
            const std::size_t first = as.mark();
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, z[c].offset + j, 1.0);
            }
            as.name_rows("z" + suffix, first);
        }
    }

    // Risk epigraph rows.
    for (int c = 0; c < 2; ++c) {
        const double inv_m = 1.0 / static_cast<double>(m[c]);
        if (plan.cls[c].msd) {
            // y_j >= z_j - mean(z): y_j - z_j + (1/m) sum_i z_i >= 0.
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, y[c].offset + j, 1.0);
                for (std::size_t i = 0; i < m[c]; ++i) {
                    const double coeff = (i == j ? -1.0 : 0.0) + inv_m;
                    if (coeff != 0.0) {
                        as.a_entry(row, z[c].offset + i, coeff);
                    }
                }
            }
        }
        if (plan.cls[c].avar) {
            // y_j >= z_j - t.
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, y[c].offset + j, 1.0);
                as.a_entry(row, z[c].offset + j, -1.0);
                as.a_entry(row, t[c].offset, 1.0);
            }
        }
        if (plan.cls[c].msd || plan.cls[c].avar) {
            for (std::size_t j = 0; j < m[c]; ++j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, y[c].offset + j, 1.0);
            }
        }
    }
    if (plan.pooled_avar) {
        std::size_t pooled_j = 0;
        for (int c = 0; c < 2; ++c) {
            for (std::size_t j = 0; j < m[c]; ++j, ++pooled_j) {
                const auto row = as.add_row(0.0, kInf);
                as.a_entry(row, y_pool.offset + pooled_j, 1.0);
                as.a_entry(row, z[c].offset + j, -1.0);
                as.a_entry(row, t_pool.offset, 1.0);
            }
        }
        for (std::size_t j = 0; j < m[0] + m[1]; ++j) {
            const auto row = as.add_row(0.0, kInf);
            as.a_entry(row, y_pool.offset + j, 1.0);
        }
    }

    return as.finish();
}

namespace {

TrainedModel extract_impl(const QuadraticProgram& qp,
                          const Eigen::VectorXd& x_opt,
                          const Eigen::VectorXd* y_opt, bool audit,
                          const LossSpec& spec, const LabeledDataset& data) {
    TrainedModel model;
    model.spec = spec;
    model.classifier.v = qp.block(x_opt, "v");
    model.classifier.gamma = qp.block(x_opt, "gamma")[0];
    model.objective = qp.objective(x_opt);

    Eigen::VectorXd raw0, raw1;
    if (spec.kind == LossKind::huber) {
        raw0 = qp.block(x_opt, "a0") + qp.block(x_opt, "b0");
        raw1 = qp.block(x_opt, "a1") + qp.block(x_opt, "b1");
    } else {
        raw0 = qp.block(x_opt, "z0");
        raw1 = qp.block(x_opt, "z1");
    }
    model.slack0.resize(raw0.size());
    model.slack1.resize(raw1.size());

    // Stored slacks are the hinge values the classifier realizes; the raw
    // slack variables are only audited, within solver precision, so wiring
    // mistakes between the rows and the dataset cannot pass silently.
    Eigen::Index j0 = 0, j1 = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const double score = model.classifier.score(
            data.features.row(static_cast<Eigen::Index>(r)).transpose());
        if (data.labels[r] == 0) {
            const double raw = raw0[j0];
            model.slack0[j0++] = std::max(0.0, 1.0 + score);
            const double tol = 1e-6 * (1.0 + std::abs(score) + std::abs(raw));
            if (audit && (score - raw > -1.0 + tol || raw < -tol)) {
                throw SolverError("extracted solution violates a class-0 margin row");
            }
        } else {
            const double raw = raw1[j1];
            model.slack1[j1++] = std::max(0.0, 1.0 - score);
            const double tol = 1e-6 * (1.0 + std::abs(score) + std::abs(raw));
            if (audit && (score + raw < 1.0 - tol || raw < -tol)) {
                throw SolverError("extracted solution violates a class-1 margin row");
            }
        }
    }

    if (y_opt != nullptr && spec.kind != LossKind::huber) {
        // Margin rows press class 0 against the upper bound (multiplier
        // >= 0) and class 1 against the lower (multiplier <= 0); the slack
        // sign rows press against their lower bound. The signed sum keeps
        // stationarity exact even when a degenerate active set splits the
        // weight between the two rows in an odd way.
        model.price0 = qp.row_block(*y_opt, "margin0") -
                       qp.row_block(*y_opt, "z0");
        model.price1 = -qp.row_block(*y_opt, "margin1") -
                       qp.row_block(*y_opt, "z1");
    }
    return model;
}

} // namespace

TrainedModel extract_solution(const QuadraticProgram& qp, const Solution& sol,
                              const LossSpec& spec,
                              const LabeledDataset& data) {
    const bool audit = sol.status == SolveStatus::optimal;
    TrainedModel model = extract_impl(qp, sol.x, &sol.y, audit, spec, data);
    model.status = sol.status;
    return model;
}

TrainedModel extract_solution(const QuadraticProgram& qp,
                              const Eigen::VectorXd& x_opt,
                              const LossSpec& spec,
                              const LabeledDataset& data) {
    return extract_impl(qp, x_opt, nullptr, true, spec, data);
}

TrainedModel train(const LossSpec& spec, const LabeledDataset& data,
                   const SolverSettings& settings) {
    const QuadraticProgram qp = build(spec, data);
    const Solution sol = solve(qp, settings);
    if (sol.status == SolveStatus::infeasible) {
        throw SolverError("training QP reported infeasible");
    }
    return extract_solution(qp, sol, spec, data);
}

} // namespace risksvm
