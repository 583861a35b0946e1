#pragma once

#include "risksvm/evaluation.hpp"
#include "risksvm/implied.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace risksvm {

enum class TargetMetric {
    f1,  // F1 at threshold 0
    auc,
};

const char* to_string(TargetMetric metric);
TargetMetric target_metric_from_string(const std::string& name);

// One experiment: a dataset, a loss, and a parameter grid (the cartesian
// product of whichever axes the loss uses; axes it does not use are
// ignored). Single-element axes describe a single run.
struct ExperimentConfig {
    std::string dataset;        // CSV path
    std::string label_column;
    std::string positive_label; // label value mapped to class 1
    std::string loss;           // one of the eight formulation names

    std::vector<double> lambda;
    std::vector<double> alpha;  // pooled tail mass (joint_cvar)
    std::vector<double> alpha1; // class-0 tail mass (two_cvar)
    std::vector<double> alpha2; // class-1 tail mass
    std::vector<double> beta;   // expectation weight (joint_cvar, risk_cvar)
    std::vector<double> beta1;
    std::vector<double> beta2;
    std::vector<double> kappa;  // defaults to {1.0}
    std::vector<double> delta;  // defaults to {1e-2}

    int folds = 5;
    std::uint64_t seed = 1;
    bool standardize = true;
    TargetMetric target = TargetMetric::f1;
    double confidence = 0.95;
    int bootstrap_samples = 1000;
    int threads = 0; // grid-level concurrency; 0 picks the hardware count
};

// The loss specs of the cartesian grid, ordered so that a linear scan with
// strict improvement breaks target-metric ties toward smaller lambda, then
// smaller alpha, then smaller beta. Throws std::invalid_argument when an
// axis the loss requires is empty.
std::vector<LossSpec> parameter_grid(const ExperimentConfig& config);

struct SweepRow {
    LossSpec spec;
    bool ok = false;
    std::string error; // failure reason when !ok

    ConfusionCounts counts; // threshold 0
    Metrics threshold0;
    double auc = 0.0;
    double best_f1 = 0.0;
    double best_f1_threshold = 0.0;
    RiskTable table; // without confidence intervals

    double target_value(TargetMetric metric) const {
        return metric == TargetMetric::f1 ? threshold0.f1 : auc;
    }
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<SweepRow> rows; // grid order
    int best = -1;              // index of the selected row; -1 if none succeeded
};

// Cross-validates every grid point (grid points run concurrently, folds
// sequentially within each) and selects the row maximizing the target
// metric. A failing grid point is recorded in its row; the sweep continues.
SweepResult run_sweep(const ExperimentConfig& config, const LabeledDataset& data);

// Re-evaluation of one row with confidence intervals, for report emission.
CrossValidationResult evaluate_row(const ExperimentConfig& config,
                                   const LossSpec& spec,
                                   const LabeledDataset& data);

} // namespace risksvm
