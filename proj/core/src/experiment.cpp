#include "risksvm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace risksvm {

const char* to_string(TargetMetric metric) {
    return metric == TargetMetric::f1 ? "f1" : "auc";
}

TargetMetric target_metric_from_string(const std::string& name) {
    if (name == "f1") {
        return TargetMetric::f1;
    }
    if (name == "auc") {
        return TargetMetric::auc;
    }
    throw std::invalid_argument("unknown target metric: " + name);
}

namespace {

std::vector<double> axis(const std::vector<double>& values, const char* name,
                         bool required, double fallback = 0.0) {
    if (values.empty()) {
        if (required) {
            throw std::invalid_argument(std::string("the loss needs values for ") + name);
        }
        return {fallback};
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
}

} // namespace

std::vector<LossSpec> parameter_grid(const ExperimentConfig& config) {
    const LossKind kind = loss_kind_from_string(config.loss);

    // Which axes the formulation reads. Everything else stays unset.
    const bool use_lambda = kind != LossKind::exp_val && kind != LossKind::huber &&
        kind != LossKind::joint_cvar;
    const bool use_alpha = kind == LossKind::joint_cvar;
    const bool use_alpha1 = kind == LossKind::two_cvar;
    const bool use_alpha2 = kind == LossKind::one_cvar ||
        kind == LossKind::risk_cvar || kind == LossKind::two_cvar;
    const bool use_beta = kind == LossKind::joint_cvar || kind == LossKind::risk_cvar;
    const bool use_beta1 = kind == LossKind::two_cvar;
    const bool use_beta2 = kind == LossKind::two_cvar;
    const bool use_kappa = kind == LossKind::asym_risk || kind == LossKind::one_cvar ||
        kind == LossKind::risk_cvar || kind == LossKind::two_risk;

    const auto lambdas = use_lambda ? axis(config.lambda, "lambda", true)
                                    : std::vector<double>{0.0};
    const auto alphas = use_alpha ? axis(config.alpha, "alpha", true)
                                  : std::vector<double>{0.0};
    const auto alpha1s = use_alpha1 ? axis(config.alpha1, "alpha1", true)
                                    : std::vector<double>{0.0};
    const auto alpha2s = use_alpha2 ? axis(config.alpha2, "alpha2", true)
                                    : std::vector<double>{0.0};
    const auto betas = use_beta ? axis(config.beta, "beta", true)
                                : std::vector<double>{0.0};
    const auto beta1s = use_beta1 ? axis(config.beta1, "beta1", true)
                                  : std::vector<double>{0.0};
    const auto beta2s = use_beta2 ? axis(config.beta2, "beta2", true)
                                  : std::vector<double>{0.0};
    const auto kappas = axis(config.kappa, "kappa", false, 1.0);
    const auto deltas = axis(config.delta, "delta", false, 1e-2);

    // Nesting order fixes the tie-breaking of the selection scan: lambda
    // varies slowest, then the alphas, then the betas.
    std::vector<LossSpec> grid;
    for (double lam : lambdas)
    for (double al : alphas)
    for (double al1 : alpha1s)
    for (double al2 : alpha2s)
    for (double be : betas)
    for (double be1 : beta1s)
    for (double be2 : beta2s)
    for (double ka : kappas)
    for (double de : deltas) {
        LossSpec spec;
        spec.kind = kind;
        if (use_lambda) spec.lambda = lam;
        if (use_alpha) spec.alpha = al;
        if (use_alpha1) spec.alpha1 = al1;
        if (use_alpha2) spec.alpha2 = al2;
        if (use_beta) spec.beta = be;
        if (use_beta1) spec.beta1 = be1;
        if (use_beta2) spec.beta2 = be2;
        if (use_kappa) spec.kappa = ka;
        spec.delta = de;
        spec.validate();
        grid.push_back(spec);
    }
    return grid;
}

SweepResult run_sweep(const ExperimentConfig& config, const LabeledDataset& data) {
    SweepResult result;
    result.config = config;

    const std::vector<LossSpec> grid = parameter_grid(config);
    result.rows.resize(grid.size());

    CrossValidationOptions options;
    options.k = config.folds;
    options.seed = config.seed;
    options.standardize = config.standardize;
    options.with_ci = false; // intervals only for the selected row, via evaluate_row
    options.parallel_folds = false;

    auto run_point = [&](std::size_t g) {
        SweepRow& row = result.rows[g];
        row.spec = grid[g];
        try {
            const CrossValidationResult cv = kfold_cross_validate(grid[g], data, options);
            row.counts = cv.report.counts;
            row.threshold0 = cv.report.threshold0;
            row.auc = cv.report.curve.auc;
            row.best_f1 = cv.report.curve.best_f1;
            row.best_f1_threshold = cv.report.curve.best_f1_threshold;
            row.table = cv.report.table;
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
    };

    unsigned workers = config.threads > 0
        ? static_cast<unsigned>(config.threads)
        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
    if (workers <= 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            run_point(g);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t g = next.fetch_add(1); g < grid.size();
                     g = next.fetch_add(1)) {
                    run_point(g);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (std::size_t g = 0; g < result.rows.size(); ++g) {
        const SweepRow& row = result.rows[g];
        if (!row.ok) {
            continue;
        }
        if (result.best < 0 ||
            row.target_value(config.target) >
                result.rows[static_cast<std::size_t>(result.best)].target_value(config.target)) {
            result.best = static_cast<int>(g);
        }
    }
    return result;
}

CrossValidationResult evaluate_row(const ExperimentConfig& config,
                                   const LossSpec& spec,
                                   const LabeledDataset& data) {
    CrossValidationOptions options;
    options.k = config.folds;
    options.seed = config.seed;
    options.standardize = config.standardize;
    options.with_ci = true;
    options.confidence = config.confidence;
    options.bootstrap_samples = config.bootstrap_samples;
    options.parallel_folds = true;
    return kfold_cross_validate(spec, data, options);
}

} // namespace risksvm
