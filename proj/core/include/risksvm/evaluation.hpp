#pragma once

#include "risksvm/build_qp.hpp"
#include "risksvm/dataset.hpp"
#include "risksvm/loss.hpp"
#include "risksvm/risk.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace risksvm {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double fpr = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    bool precision_defined = true; // false when there were no positive predictions
};

Metrics metrics(const ConfusionCounts& counts);

// Confusion counts of thresholded scores: predict class 1 when
// score >= threshold.
ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels,
                             double threshold);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
    double f1 = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // sorted by threshold ascending; +/-inf sentinels included
    double auc = 0.0;
    double best_f1 = 0.0;
    double best_f1_threshold = 0.0;
};

// Threshold sweep over all distinct scores plus -inf/+inf sentinels, with
// trapezoid AUC. Throws std::invalid_argument when only one class is present.
RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Student-t interval around the plug-in risk estimate, with the estimator's
// standard deviation taken from a seeded nonparametric bootstrap. Degrees of
// freedom are m minus the number of composed estimators (1 for expectation
// and AVaR, 2 for mean-semideviation, the max across components for convex
// combinations). Throws when the sample is smaller than that.
ConfidenceInterval confidence_interval(const EmpiricalDistribution& errors,
                                       const RiskSpec& spec,
                                       double confidence,
                                       int bootstrap_samples = 1000,
                                       std::uint64_t seed = 0);

struct RiskCell {
    double value = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool has_ci = false;
};

// One column per reporting measure (expectation, mean-semideviation with
// kappa 1, and AVaR at tail masses 0.75 / 0.85 / 0.95), one row per class
// plus their sum.
struct RiskTable {
    static const std::array<RiskSpec, 5>& specs();
    static const std::array<const char*, 5>& names();

    std::array<RiskCell, 5> class0;
    std::array<RiskCell, 5> class1;
    std::array<RiskCell, 5> total;
};

RiskTable risk_table(const EmpiricalDistribution& errors_class0,
                     const EmpiricalDistribution& errors_class1);

RiskTable risk_table_with_ci(const EmpiricalDistribution& errors_class0,
                             const EmpiricalDistribution& errors_class1,
                             double confidence,
                             int bootstrap_samples = 1000,
                             std::uint64_t seed = 0);

// Stratified fold assignment: each class is shuffled with the seeded
// generator and dealt round-robin, so per-fold class proportions are within
// one sample of the global ones. fold_of[r] is the fold of record r.
struct FoldPlan {
    int k = 0;
    std::vector<int> fold_of;
};

FoldPlan stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

struct EvaluationReport {
    ConfusionCounts counts; // at threshold 0
    Metrics threshold0;
    RocCurve curve;
    RiskTable table;
    int folds = 0;
    std::uint64_t seed = 0;
    bool standardized = false;
};

struct CrossValidationResult {
    std::vector<double> scores; // pooled normalized out-of-sample scores, record order
    std::vector<int> labels;
    std::vector<double> errors;        // score_error per record
    std::vector<double> signed_errors; // signed_error per record
    EvaluationReport report;
};

struct CrossValidationOptions {
    int k = 5;
    std::uint64_t seed = 1;
    bool standardize = true; // z-score features with training-fold statistics
    bool with_ci = true;
    double confidence = 0.95;
    int bootstrap_samples = 1000;
    bool parallel_folds = true; // train folds concurrently; results are
                                // identical either way
    SolverSettings solver;
};

// Trains one model per fold on the remaining folds and pools the held-out
// normalized scores into a single report. Folds keep both classes or the
// call throws.
CrossValidationResult kfold_cross_validate(const LossSpec& spec,
                                           const LabeledDataset& data,
                                           const CrossValidationOptions& options);

} // namespace risksvm
