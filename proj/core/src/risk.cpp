#include "risksvm/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risksvm {

namespace {

void check_alpha_tail(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
}

void check_kappa(double kappa) {
    if (kappa < 0.0 || kappa > 1.0) {
        throw std::invalid_argument("kappa must lie in [0, 1]");
    }
}

void check_beta(double beta) {
    if (beta < 0.0 || beta > 1.0) {
        throw std::invalid_argument("beta must lie in [0, 1]");
    }
}

std::vector<std::size_t> sorted_order(const std::vector<double>& v, bool ascending) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Ties keep original index order so the density construction is deterministic.
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return ascending ? v[a] < v[b] : v[a] > v[b];
    });
    return idx;
}

} // namespace

RiskSpec RiskSpec::expectation() {
    return RiskSpec{RiskKind::expectation, 1.0, 1.0, 1.0, 1};
}

RiskSpec RiskSpec::value_at_risk(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("value-at-risk level must lie in (0, 1)");
    }
    return RiskSpec{RiskKind::value_at_risk, alpha, 1.0, 1.0, 1};
}

RiskSpec RiskSpec::average_value_at_risk(double alpha) {
    check_alpha_tail(alpha);
    return RiskSpec{RiskKind::avar, alpha, 1.0, 1.0, 1};
}

RiskSpec RiskSpec::mean_semideviation(double kappa, int order) {
    check_kappa(kappa);
    if (order != 1) {
        throw std::invalid_argument("only order-1 semideviation is supported");
    }
    return RiskSpec{RiskKind::mean_semideviation, 1.0, 1.0, kappa, order};
}

RiskSpec RiskSpec::convex_combo(double beta, double alpha) {
    check_beta(beta);
    check_alpha_tail(alpha);
    return RiskSpec{RiskKind::convex_combo, alpha, beta, 1.0, 1};
}

double expectation(const EmpiricalDistribution& dist) {
    return dist.mean();
}

double value_at_risk(const EmpiricalDistribution& dist, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("value-at-risk level must lie in (0, 1)");
    }
    const auto idx = sorted_order(dist.values(), /*ascending=*/true);
    const double target = 1.0 - alpha;
    double cum = 0.0;
    for (std::size_t j : idx) {
        cum += dist.weights()[j];
        if (cum >= target - 1e-12) {
            return dist.values()[j];
        }
    }
    return dist.values()[idx.back()];
}

double avar_sorted(const EmpiricalDistribution& dist, double alpha) {
    check_alpha_tail(alpha);
    const auto idx = sorted_order(dist.values(), /*ascending=*/false);
    double remaining = alpha;
    double acc = 0.0;
    for (std::size_t j : idx) {
        const double take = std::min(dist.weights()[j], remaining);
        acc += take * dist.values()[j];
        remaining -= take;
        if (remaining <= 1e-15) {
            break;
        }
    }
    return acc / alpha;
}

AvarVariational avar_variational(const EmpiricalDistribution& dist, double alpha) {
    check_alpha_tail(alpha);
    const auto& v = dist.values();
    const auto& w = dist.weights();

    auto objective = [&](double eta) {
        double tail = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            tail += w[j] * std::max(0.0, v[j] - eta);
        }
        return eta + tail / alpha;
    };

    // The objective is piecewise linear and convex with breakpoints at the
    // sample values, so scanning those suffices. Among the (possibly flat)
    // minimizing interval we report the largest breakpoint.
    AvarVariational best{objective(v[0]), v[0]};
    for (std::size_t j = 1; j < v.size(); ++j) {
        const double g = objective(v[j]);
        const double tol = 1e-12 * (1.0 + std::abs(best.value));
        if (g < best.value - tol) {
            best = {g, v[j]};
        } else if (g <= best.value + tol && v[j] > best.minimizer) {
            best.minimizer = v[j];
        }
    }
    return best;
}

double mean_semideviation(const EmpiricalDistribution& dist, double kappa, int order) {
    check_kappa(kappa);
    if (order != 1) {
        throw std::invalid_argument("only order-1 semideviation is supported");
    }
    const double m = dist.mean();
    double dev = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        dev += dist.weights()[j] * std::max(0.0, dist.values()[j] - m);
    }
    return m + kappa * dev;
}

double evaluate(const RiskSpec& spec, const EmpiricalDistribution& dist) {
    switch (spec.kind) {
    case RiskKind::expectation:
        return expectation(dist);
    case RiskKind::value_at_risk:
        return value_at_risk(dist, spec.alpha);
    case RiskKind::avar:
        return avar_sorted(dist, spec.alpha);
    case RiskKind::mean_semideviation:
        return mean_semideviation(dist, spec.kappa, spec.order);
    case RiskKind::convex_combo:
        check_beta(spec.beta);
        return spec.beta * expectation(dist) +
               (1.0 - spec.beta) * avar_sorted(dist, spec.alpha);
    }
    throw std::logic_error("unknown risk kind");
}

namespace {

std::vector<double> avar_density(const EmpiricalDistribution& dist, double alpha) {
    const auto& v = dist.values();
    const auto& w = dist.weights();
    std::vector<double> zeta(v.size(), 0.0);
    if (alpha >= 1.0) {
        std::fill(zeta.begin(), zeta.end(), 1.0);
        return zeta;
    }
    const double q = value_at_risk(dist, alpha);
    double mass_above = 0.0;
    double mass_at = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] > q) {
            mass_above += w[j];
        } else if (v[j] == q) {
            mass_at += w[j];
        }
    }
    // Strict tail takes the full 1/alpha density; the quantile atom absorbs
    // whatever mass is left so the representation is exact for atoms.
    const double boundary = mass_at > 0.0
        ? std::max(0.0, alpha - mass_above) / (alpha * mass_at)
        : 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] > q) {
            zeta[j] = 1.0 / alpha;
        } else if (v[j] == q) {
            zeta[j] = boundary;
        }
    }
    return zeta;
}

std::vector<double> msd_density(const EmpiricalDistribution& dist, double kappa) {
    const auto& v = dist.values();
    const auto& w = dist.weights();
    const double m = dist.mean();
    double mass_above = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] > m) {
            mass_above += w[j];
        }
    }
    std::vector<double> zeta(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double indicator = v[j] > m ? 1.0 : 0.0;
        zeta[j] = 1.0 + kappa * (indicator - mass_above);
    }
    return zeta;
}

} // namespace

std::vector<double> subgradient_density(const RiskSpec& spec, const EmpiricalDistribution& dist) {
    switch (spec.kind) {
    case RiskKind::expectation:
        return std::vector<double>(dist.size(), 1.0);
    case RiskKind::avar:
        check_alpha_tail(spec.alpha);
        return avar_density(dist, spec.alpha);
    case RiskKind::mean_semideviation: {
        check_kappa(spec.kappa);
        if (spec.order != 1) {
            throw std::invalid_argument("only order-1 semideviation is supported");
        }
        return msd_density(dist, spec.kappa);
    }
    case RiskKind::convex_combo: {
        check_beta(spec.beta);
        check_alpha_tail(spec.alpha);
        auto zeta = avar_density(dist, spec.alpha);
        for (double& z : zeta) {
            z = spec.beta + (1.0 - spec.beta) * z;
        }
        return zeta;
    }
    case RiskKind::value_at_risk:
        throw std::invalid_argument("value-at-risk admits no coherent dual density");
    }
    throw std::logic_error("unknown risk kind");
}

} // namespace risksvm
