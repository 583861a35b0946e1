#include "risksvm/empirical_distribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risksvm {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("empirical distribution needs at least one value");
    }
    weights_.assign(values_.size(), 1.0 / static_cast<double>(values_.size()));
    validate();
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values,
                                             std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
    validate();
}

void EmpiricalDistribution::validate() const {
    if (values_.empty() || values_.size() != weights_.size()) {
        throw std::invalid_argument("values and weights must be nonempty and equal length");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j])) {
            throw std::invalid_argument("non-finite value in empirical distribution");
        }
        if (!(weights_[j] > 0.0)) {
            throw std::invalid_argument("weights must be strictly positive");
        }
        total += weights_[j];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("weights must sum to 1");
    }
}

double EmpiricalDistribution::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        m += weights_[j] * values_[j];
    }
    return m;
}

} // namespace risksvm
