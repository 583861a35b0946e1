#pragma once

#include <cstddef>
#include <vector>

namespace risksvm {

// Discrete distribution of error realizations: values z_j with strictly
// positive probability weights summing to one. The default constructor
// assigns uniform weights 1/m.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> values);
    EmpiricalDistribution(std::vector<double> values, std::vector<double> weights);

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return values_.size(); }

    double mean() const;

private:
    void validate() const;

    std::vector<double> values_;
    std::vector<double> weights_;
};

} // namespace risksvm
