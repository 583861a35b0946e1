#include "risksvm/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cstdlib>
#include <iostream>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace risksvm {

const char* to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Column-wise infinity norms of a column-major sparse matrix.
Eigen::VectorXd col_norms(const SpMat& m) {
    Eigen::VectorXd norms = Eigen::VectorXd::Zero(m.cols());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            norms[it.col()] = std::max(norms[it.col()], std::abs(it.value()));
        }
    }
    return norms;
}

Eigen::VectorXd row_norms(const SpMat& m) {
    Eigen::VectorXd norms = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            norms[it.row()] = std::max(norms[it.row()], std::abs(it.value()));
        }
    }
    return norms;
}

void scale_columns(SpMat& m, const Eigen::VectorXd& s) {
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            it.valueRef() *= s[it.col()];
        }
    }
}

void scale_rows(SpMat& m, const Eigen::VectorXd& s) {
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            it.valueRef() *= s[it.row()];
        }
    }
}

struct Scaling {
    Eigen::VectorXd d; // variable space
    Eigen::VectorXd e; // row space
    double c = 1.0;    // cost
};

// Modified Ruiz equilibration of the stacked matrix [P A'; A 0] followed by
// cost normalization. Operates in place on the scaled problem data.
Scaling equilibrate(SpMat& P, Eigen::VectorXd& q, SpMat& A,
                    Eigen::VectorXd& l, Eigen::VectorXd& u, bool enabled) {
    const Eigen::Index n = q.size();
    const Eigen::Index m = l.size();
    Scaling s;
    s.d = Eigen::VectorXd::Ones(n);
    s.e = Eigen::VectorXd::Ones(m);
    if (!enabled) {
        return s;
    }
    for (int round = 0; round < 10; ++round) {
        Eigen::VectorXd np = col_norms(P);
        Eigen::VectorXd na = col_norms(A);
        Eigen::VectorXd dd(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double nj = std::max(np[j], na[j]);
            dd[j] = nj > 1e-12 ? 1.0 / std::sqrt(nj) : 1.0;
        }
        Eigen::VectorXd ra = row_norms(A);
        Eigen::VectorXd de(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            de[i] = ra[i] > 1e-12 ? 1.0 / std::sqrt(ra[i]) : 1.0;
        }
        scale_columns(P, dd);
        scale_rows(P, dd);
        q = q.cwiseProduct(dd);
        scale_columns(A, dd);
        scale_rows(A, de);
        l = l.cwiseProduct(de); // +/-inf stay infinite under positive scaling
        u = u.cwiseProduct(de);
        s.d = s.d.cwiseProduct(dd);
        s.e = s.e.cwiseProduct(de);

        const double pnorm = n > 0 ? col_norms(P).mean() : 0.0;
        const double denom = std::max(pnorm, inf_norm(q));
        const double gamma = denom > 1e-12 ? 1.0 / denom : 1.0;
        P *= gamma;
        q *= gamma;
        s.c *= gamma;
    }
    return s;
}

// Shared KKT factorization: LDL' of the quasi-definite matrix
// [P + sigma I, A'; A, -diag(1/rho)], with an LU fallback when the
// Cholesky-style factorization breaks down numerically.
struct KktSolver {
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    Eigen::SparseLU<SpMat> lu;
    bool use_lu = false;
    bool analyzed = false;

    bool factor(const SpMat& kkt) {
        if (!analyzed) {
            ldlt.analyzePattern(kkt);
            analyzed = true;
        }
        ldlt.factorize(kkt);
        if (ldlt.info() == Eigen::Success) {
            use_lu = false;
            return true;
        }
        lu.compute(kkt);
        use_lu = true;
        return lu.info() == Eigen::Success;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        return use_lu ? lu.solve(rhs).eval() : ldlt.solve(rhs).eval();
    }
};

SpMat assemble_kkt(const SpMat& P, const SpMat& A, double sigma,
                   const Eigen::VectorXd& rho) {
    const Eigen::Index n = P.rows();
    const Eigen::Index m = A.rows();
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(P.nonZeros() + 2 * A.nonZeros() + n + m));
    for (int k = 0; k < P.outerSize(); ++k) {
        for (SpMat::InnerIterator it(P, k); it; ++it) {
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        trip.emplace_back(static_cast<int>(j), static_cast<int>(j), sigma);
    }
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            trip.emplace_back(static_cast<int>(n + it.row()), static_cast<int>(it.col()),
                              it.value());
            trip.emplace_back(static_cast<int>(it.col()), static_cast<int>(n + it.row()),
                              it.value());
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        trip.emplace_back(static_cast<int>(n + i), static_cast<int>(n + i), -1.0 / rho[i]);
    }
    SpMat kkt(n + m, n + m);
    kkt.setFromTriplets(trip.begin(), trip.end());
    return kkt;
}

// Active-set refinement: re-solve the equality-constrained KKT system on the
// rows the duals mark active, with tiny regularization plus iterative
// refinement against the unregularized system. A degenerate active set can
// hand a row a multiplier of the wrong sign — a stationary but invalid
// certificate — so rows whose sign comes out materially wrong are dropped
// and the system re-solved. Returns false when the refined point is no
// better or the signs cannot be cleaned up.
bool polish(const QuadraticProgram& qp, const SpMat& p_full,
            Eigen::VectorXd& x, Eigen::VectorXd& y,
            double& primal_res, double& dual_res) {
    const Eigen::Index n = qp.num_vars();
    // Multipliers of genuinely active rows sit many orders of magnitude
    // above the float dust the inactive rows carry; a relative threshold
    // keeps the dust out of the active set.
    const double eps_active = 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> active;
    std::vector<double> bound;
    std::vector<int> side; // -1 lower, +1 upper, 0 equality row (any sign)
    for (Eigen::Index i = 0; i < qp.num_constraints(); ++i) {
        if (y[i] < -eps_active && qp.l[i] > -kInf) {
            active.push_back(i);
            bound.push_back(qp.l[i]);
            side.push_back(qp.l[i] == qp.u[i] ? 0 : -1);
        } else if (y[i] > eps_active && qp.u[i] < kInf) {
            active.push_back(i);
            bound.push_back(qp.u[i]);
            side.push_back(qp.l[i] == qp.u[i] ? 0 : 1);
        }
    }

    const double reg = 1e-9;
    std::vector<Triplet> p_part;
    for (int k = 0; k < p_full.outerSize(); ++k) {
        for (SpMat::InnerIterator it(p_full, k); it; ++it) {
            p_part.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                it.value());
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        p_part.emplace_back(static_cast<int>(j), static_cast<int>(j), reg);
    }

    Eigen::VectorXd x_new, y_new;
    for (int attempt = 0;; ++attempt) {
        const Eigen::Index na = static_cast<Eigen::Index>(active.size());
        std::vector<Triplet> trip = p_part;
        // qp.A is column-major; gather active rows in one pass over the nonzeros.
        std::vector<Eigen::Index> row_slot(
            static_cast<std::size_t>(qp.num_constraints()), -1);
        for (Eigen::Index r = 0; r < na; ++r) {
            row_slot[static_cast<std::size_t>(active[static_cast<std::size_t>(r)])] = r;
        }
        for (int k = 0; k < qp.A.outerSize(); ++k) {
            for (SpMat::InnerIterator it(qp.A, k); it; ++it) {
                const Eigen::Index r = row_slot[static_cast<std::size_t>(it.row())];
                if (r >= 0) {
                    trip.emplace_back(static_cast<int>(n + r), static_cast<int>(it.col()),
                                      it.value());
                    trip.emplace_back(static_cast<int>(it.col()), static_cast<int>(n + r),
                                      it.value());
                }
            }
        }
        for (Eigen::Index r = 0; r < na; ++r) {
            trip.emplace_back(static_cast<int>(n + r), static_cast<int>(n + r), -reg);
        }
        SpMat kreg(n + na, n + na);
        kreg.setFromTriplets(trip.begin(), trip.end());

        Eigen::SimplicialLDLT<SpMat, Eigen::Lower> fact;
        fact.compute(kreg);
        if (fact.info() != Eigen::Success) {
            return false;
        }

        Eigen::VectorXd rhs(n + na);
        rhs.head(n) = -qp.q;
        for (Eigen::Index r = 0; r < na; ++r) {
            rhs[n + r] = bound[static_cast<std::size_t>(r)];
        }

        // Unregularized operator application for the refinement residual.
        auto apply_k0 = [&](const Eigen::VectorXd& s) {
            Eigen::VectorXd out(n + na);
            Eigen::VectorXd xs = s.head(n);
            out.head(n) = p_full * xs;
            Eigen::VectorXd ys = Eigen::VectorXd::Zero(qp.num_constraints());
            for (Eigen::Index r = 0; r < na; ++r) {
                ys[active[r]] = s[n + r];
            }
            out.head(n) += qp.A.transpose() * ys;
            Eigen::VectorXd ax = qp.A * xs;
            for (Eigen::Index r = 0; r < na; ++r) {
                out[n + r] = ax[active[r]];
            }
            return out;
        };

        Eigen::VectorXd sol = fact.solve(rhs);
        for (int round = 0; round < 3; ++round) {
            Eigen::VectorXd resid = rhs - apply_k0(sol);
            sol += fact.solve(resid);
        }

        x_new = sol.head(n);
        y_new = Eigen::VectorXd::Zero(qp.num_constraints());
        double y_scale = 1.0;
        for (Eigen::Index r = 0; r < na; ++r) {
            y_new[active[r]] = sol[n + r];
            y_scale = std::max(y_scale, std::abs(sol[n + r]));
        }

        const double eps_sign = 1e-9 * y_scale;
        std::size_t kept = 0;
        for (std::size_t r = 0; r < active.size(); ++r) {
            const double mult = sol[n + static_cast<Eigen::Index>(r)];
            const bool wrong = (side[r] < 0 && mult > eps_sign) ||
                               (side[r] > 0 && mult < -eps_sign);
            if (!wrong) {
                active[kept] = active[r];
                bound[kept] = bound[r];
                side[kept] = side[r];
                ++kept;
            }
        }
        if (kept == active.size()) {
            break;
        }
        if (attempt == 5) {
            return false;
        }
        active.resize(kept);
        bound.resize(kept);
        side.resize(kept);
    }

    const KktResiduals after = kkt_residuals(qp, x_new, y_new);
    if (std::getenv("RISKSVM_POLISH_DEBUG") != nullptr) {
        std::cerr << "polish: na " << active.size() << " of " << qp.num_constraints()
                  << " before rp " << primal_res << " rd " << dual_res
                  << " after rp " << after.primal << " rd " << after.dual << '\n';
    }
    if (std::max(after.primal, after.dual) < std::max(primal_res, dual_res)) {
        x = std::move(x_new);
        y = std::move(y_new);
        primal_res = after.primal;
        dual_res = after.dual;
        return true;
    }
    return false;
}

} // namespace

Solution solve(const QuadraticProgram& qp, const SolverSettings& settings) {
    const Eigen::Index n = qp.num_vars();
    const Eigen::Index m = qp.num_constraints();
    if (qp.A.rows() != m || qp.A.cols() != n || qp.u.size() != m || qp.P.rows() != n) {
        throw std::invalid_argument("inconsistent QP dimensions");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        if (qp.l[i] > qp.u[i]) {
            throw std::invalid_argument("lower bound exceeds upper bound");
        }
    }

    // Scaled copies; the original qp stays untouched for unscaled checks.
    SpMat P = qp.P.selfadjointView<Eigen::Upper>();
    SpMat A = qp.A;
    Eigen::VectorXd q = qp.q;
    Eigen::VectorXd l = qp.l;
    Eigen::VectorXd u = qp.u;
    const Scaling sc = equilibrate(P, q, A, l, u, settings.scaling);

    auto make_rho = [&](double base) {
        Eigen::VectorXd rho(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const bool equality = qp.l[i] == qp.u[i];
            rho[i] = std::clamp(base * (equality ? 1e3 : 1.0), 1e-6, 1e6);
        }
        return rho;
    };

    double rho_base = settings.rho;
    Eigen::VectorXd rho = make_rho(rho_base);

    KktSolver kkt;
    if (!kkt.factor(assemble_kkt(P, A, settings.sigma, rho))) {
        throw std::runtime_error("KKT factorization failed");
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m).cwiseMax(l).cwiseMin(u);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd x_prev(n), y_prev(m);

    Solution out;
    out.status = SolveStatus::max_iterations;

    const double alpha = settings.relaxation;
    Eigen::VectorXd rhs(n + m), sol(n + m);

    auto unscaled_x = [&](const Eigen::VectorXd& xs) {
        return sc.d.cwiseProduct(xs).eval();
    };
    auto unscaled_y = [&](const Eigen::VectorXd& ys) {
        return (sc.e.cwiseProduct(ys) / sc.c).eval();
    };

    int iter = 0;
    for (iter = 1; iter <= settings.max_iterations; ++iter) {
        x_prev = x;
        y_prev = y;

        rhs.head(n) = settings.sigma * x - q;
        rhs.tail(m) = z - y.cwiseQuotient(rho);
        sol = kkt.solve(rhs);
        const auto xt = sol.head(n);
        const auto nu = sol.tail(m);

        Eigen::VectorXd zt = z + (nu - y).cwiseQuotient(rho);
        x = alpha * xt + (1.0 - alpha) * x;
        Eigen::VectorXd z_relaxed = alpha * zt + (1.0 - alpha) * z;
        Eigen::VectorXd z_next =
            (z_relaxed + y.cwiseQuotient(rho)).cwiseMax(l).cwiseMin(u);
        y += rho.cwiseProduct(z_relaxed - z_next);
        z = z_next;

        if (!x.allFinite() || !y.allFinite()) {
            throw std::runtime_error("solver iterates diverged to non-finite values");
        }

        if (iter % settings.check_interval != 0 && iter != settings.max_iterations) {
            continue;
        }

        // Residuals in the original (unscaled) problem.
        const Eigen::VectorXd xu = unscaled_x(x);
        const Eigen::VectorXd yu = unscaled_y(y);
        const Eigen::VectorXd ax_u = qp.A * xu;
        const Eigen::VectorXd zu = sc.e.cwiseInverse().cwiseProduct(z);
        const double rp = inf_norm(ax_u - zu);
        const Eigen::VectorXd px_u = qp.P.selfadjointView<Eigen::Upper>() * xu;
        const Eigen::VectorXd aty_u = qp.A.transpose() * yu;
        const double rd = inf_norm(px_u + qp.q + aty_u);

        const double eps_p = settings.eps_abs +
            settings.eps_rel * std::max(inf_norm(ax_u), inf_norm(zu));
        const double eps_d = settings.eps_abs +
            settings.eps_rel * std::max({inf_norm(px_u), inf_norm(aty_u), inf_norm(qp.q)});

        out.checkpoint_objectives.push_back(qp.objective(xu));
        if (settings.diagnostics) {
            (*settings.diagnostics) << "iter " << iter
                                    << " obj " << out.checkpoint_objectives.back()
                                    << " rp " << rp << " rd " << rd << '\n';
        }

        if (rp <= eps_p && rd <= eps_d) {
            out.status = SolveStatus::optimal;
            break;
        }

        // Divergence certificates on the last iterate's deltas.
        const Eigen::VectorXd dy = unscaled_y(y - y_prev);
        const double dy_norm = inf_norm(dy);
        if (dy_norm > settings.eps_infeasible) {
            const double eps = settings.eps_infeasible * dy_norm;
            bool certificate = inf_norm(qp.A.transpose() * dy) <= eps;
            double support = 0.0;
            for (Eigen::Index i = 0; certificate && i < m; ++i) {
                if (dy[i] > eps) {
                    if (qp.u[i] >= kInf) {
                        certificate = false;
                    } else {
                        support += qp.u[i] * dy[i];
                    }
                } else if (dy[i] < -eps) {
                    if (qp.l[i] <= -kInf) {
                        certificate = false;
                    } else {
                        support += qp.l[i] * dy[i];
                    }
                }
            }
            if (certificate && support < -eps) {
                out.status = SolveStatus::infeasible;
                break;
            }
        }
        const Eigen::VectorXd dx = sc.d.cwiseProduct(x - x_prev);
        const double dx_norm = inf_norm(dx);
        if (dx_norm > settings.eps_infeasible) {
            const double eps = settings.eps_infeasible * dx_norm;
            bool certificate =
                inf_norm(qp.P.selfadjointView<Eigen::Upper>() * dx) <= eps &&
                qp.q.dot(dx) < -eps;
            const Eigen::VectorXd adx = qp.A * dx;
            for (Eigen::Index i = 0; certificate && i < m; ++i) {
                if (qp.u[i] < kInf && adx[i] > eps) {
                    certificate = false;
                }
                if (qp.l[i] > -kInf && adx[i] < -eps) {
                    certificate = false;
                }
            }
            if (certificate) {
                out.status = SolveStatus::infeasible; // unbounded below
                break;
            }
        }

        if (settings.adaptive_rho && rd > 1e-30) {
            const double num = rp / std::max({inf_norm(ax_u), inf_norm(zu), 1e-12});
            const double den = rd /
                std::max({inf_norm(px_u), inf_norm(aty_u), inf_norm(qp.q), 1e-12});
            if (den > 1e-30) {
                const double ratio = std::sqrt(num / den);
                if (ratio > 5.0 || ratio < 0.2) {
                    rho_base = std::clamp(rho_base * ratio, 1e-6, 1e6);
                    rho = make_rho(rho_base);
                    if (!kkt.factor(assemble_kkt(P, A, settings.sigma, rho))) {
                        throw std::runtime_error("KKT refactorization failed");
                    }
                }
            }
        }
    }

    out.iterations = std::min(iter, settings.max_iterations);
    out.x = unscaled_x(x);
    out.y = unscaled_y(y);

    KktResiduals res = kkt_residuals(qp, out.x, out.y);
    out.primal_residual = res.primal;
    out.dual_residual = res.dual;

    if (out.status == SolveStatus::optimal && settings.polish) {
        SpMat p_full = qp.P.selfadjointView<Eigen::Upper>();
        out.polished = polish(qp, p_full, out.x, out.y,
                              out.primal_residual, out.dual_residual);
    }
    out.objective = qp.objective(out.x);
    return out;
}

KktResiduals kkt_residuals(const QuadraticProgram& qp,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
    KktResiduals out;
    const Eigen::VectorXd ax = qp.A * x;
    for (Eigen::Index i = 0; i < qp.num_constraints(); ++i) {
        double violation = 0.0;
        if (qp.l[i] > -kInf) {
            violation = std::max(violation, qp.l[i] - ax[i]);
        }
        if (qp.u[i] < kInf) {
            violation = std::max(violation, ax[i] - qp.u[i]);
        }
        out.primal = std::max(out.primal, violation);

        // Complementary slackness: positive duals must sit on the upper
        // bound, negative duals on the lower. A dual pressing against a
        // bound that does not exist is a dual infeasibility the size of the
        // multiplier itself; the product form would turn sign dust into an
        // infinity.
        if (y[i] > 0.0) {
            out.complementarity = std::max(
                out.complementarity,
                qp.u[i] < kInf ? y[i] * std::abs(ax[i] - qp.u[i]) : y[i]);
        } else if (y[i] < 0.0) {
            out.complementarity = std::max(
                out.complementarity,
                qp.l[i] > -kInf ? -y[i] * std::abs(ax[i] - qp.l[i]) : -y[i]);
        }
    }
    const Eigen::VectorXd stat =
        qp.P.selfadjointView<Eigen::Upper>() * x + qp.q + qp.A.transpose() * y;
    out.dual = inf_norm(stat);
    return out;
}

} // namespace risksvm
