#include "risksvm/evaluation.hpp"

#include "risksvm/geometry.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace risksvm {

Metrics metrics(const ConfusionCounts& c) {
    if (c.total() == 0) {
        throw std::invalid_argument("empty evaluation set");
    }
    Metrics m;
    const double fp_tn = static_cast<double>(c.fp + c.tn);
    const double tp_fn = static_cast<double>(c.tp + c.fn);
    const double tp_fp = static_cast<double>(c.tp + c.fp);
    m.fpr = fp_tn > 0.0 ? static_cast<double>(c.fp) / fp_tn : 0.0;
    m.recall = tp_fn > 0.0 ? static_cast<double>(c.tp) / tp_fn : 0.0;
    if (tp_fp > 0.0) {
        m.precision = static_cast<double>(c.tp) / tp_fp;
    } else {
        m.precision = 0.0;
        m.precision_defined = false;
    }
    const double pr = m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
    return m;
}

ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels,
                             double threshold) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("scores and labels differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool positive = scores[i] >= threshold;
        if (labels[i] == 1) {
            positive ? ++c.tp : ++c.fn;
        } else {
            positive ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const auto npos = std::count(labels.begin(), labels.end(), 1);
    const auto nneg = static_cast<std::ptrdiff_t>(labels.size()) - npos;
    if (npos == 0 || nneg == 0) {
        throw std::invalid_argument("ROC needs both classes in the evaluation set");
    }

    std::vector<double> thresholds = scores;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.insert(thresholds.begin(), -kInf);
    thresholds.push_back(kInf);

    RocCurve curve;
    curve.points.reserve(thresholds.size());
    curve.best_f1 = -1.0;
    for (const double th : thresholds) {
        const ConfusionCounts c = confusion_at(scores, labels, th);
        const Metrics m = metrics(c);
        curve.points.push_back({th, m.fpr, m.recall, m.f1});
        if (m.f1 > curve.best_f1) { // ties keep the smallest threshold
            curve.best_f1 = m.f1;
            curve.best_f1_threshold = th;
        }
    }

    // Threshold ascending means FPR descending; integrate the staircase from
    // (0,0) to (1,1) by walking the points in reverse.
    double auc = 0.0;
    for (std::size_t i = curve.points.size() - 1; i > 0; --i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i - 1];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    curve.auc = auc;
    return curve;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
}

int estimator_components(const RiskSpec& spec) {
    switch (spec.kind) {
    case RiskKind::expectation:
    case RiskKind::avar:
        return 1;
    case RiskKind::mean_semideviation:
        return 2;
    case RiskKind::convex_combo:
        return 1; // max over { expectation: 1, avar: 1 }
    case RiskKind::value_at_risk:
        break;
    }
    throw std::invalid_argument("no confidence interval for value-at-risk");
}

// Standard deviation of the plug-in estimator under nonparametric
// resampling. Each replicate gets its own seeded generator so results do not
// depend on scheduling.
double bootstrap_sd(const EmpiricalDistribution& errors, const RiskSpec& spec,
                    int samples, std::uint64_t seed) {
    const std::size_t m = errors.size();
    const auto& values = errors.values();
    const auto& weights = errors.weights();
    const bool uniform = std::all_of(weights.begin(), weights.end(), [&](double w) {
        return std::abs(w - weights[0]) < 1e-15;
    });

    std::vector<double> replicate(m);
    std::vector<double> stats(static_cast<std::size_t>(samples));
    for (int b = 0; b < samples; ++b) {
        std::mt19937_64 gen(mix_seed(seed, static_cast<std::uint64_t>(b)));
        if (uniform) {
            std::uniform_int_distribution<std::size_t> pick(0, m - 1);
            for (std::size_t j = 0; j < m; ++j) {
                replicate[j] = values[pick(gen)];
            }
        } else {
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            for (std::size_t j = 0; j < m; ++j) {
                replicate[j] = values[pick(gen)];
            }
        }
        stats[static_cast<std::size_t>(b)] =
            evaluate(spec, EmpiricalDistribution(replicate));
    }
    double mean = 0.0;
    for (double s : stats) {
        mean += s;
    }
    mean /= static_cast<double>(samples);
    double ss = 0.0;
    for (double s : stats) {
        ss += (s - mean) * (s - mean);
    }
    return std::sqrt(ss / static_cast<double>(samples - 1));
}

double t_quantile(double df, double confidence) {
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, 0.5 * (1.0 + confidence));
}

} // namespace

ConfidenceInterval confidence_interval(const EmpiricalDistribution& errors,
                                       const RiskSpec& spec,
                                       double confidence,
                                       int bootstrap_samples,
                                       std::uint64_t seed) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    if (bootstrap_samples < 2) {
        throw std::invalid_argument("need at least two bootstrap samples");
    }
    const int ell = estimator_components(spec);
    const auto m = static_cast<std::ptrdiff_t>(errors.size());
    if (m <= ell) {
        throw std::invalid_argument("sample too small for a confidence interval");
    }
    const double value = evaluate(spec, errors);
    const double sd = bootstrap_sd(errors, spec, bootstrap_samples, seed);
    if (sd == 0.0) {
        return {value, value};
    }
    const double t = t_quantile(static_cast<double>(m - ell), confidence);
    return {value - t * sd, value + t * sd};
}

const std::array<RiskSpec, 5>& RiskTable::specs() {
    static const std::array<RiskSpec, 5> s = {
        RiskSpec::expectation(),
        RiskSpec::mean_semideviation(1.0),
        RiskSpec::average_value_at_risk(0.75),
        RiskSpec::average_value_at_risk(0.85),
        RiskSpec::average_value_at_risk(0.95),
    };
    return s;
}

const std::array<const char*, 5>& RiskTable::names() {
    static const std::array<const char*, 5> n = {
        "expectation", "msd_1", "avar_0.75", "avar_0.85", "avar_0.95",
    };
    return n;
}

RiskTable risk_table(const EmpiricalDistribution& errors_class0,
                     const EmpiricalDistribution& errors_class1) {
    RiskTable table;
    for (std::size_t s = 0; s < RiskTable::specs().size(); ++s) {
        const RiskSpec& spec = RiskTable::specs()[s];
        table.class0[s].value = evaluate(spec, errors_class0);
        table.class1[s].value = evaluate(spec, errors_class1);
        table.total[s].value = table.class0[s].value + table.class1[s].value;
    }
    return table;
}

RiskTable risk_table_with_ci(const EmpiricalDistribution& errors_class0,
                             const EmpiricalDistribution& errors_class1,
                             double confidence,
                             int bootstrap_samples,
                             std::uint64_t seed) {
    RiskTable table = risk_table(errors_class0, errors_class1);
    for (std::size_t s = 0; s < RiskTable::specs().size(); ++s) {
        const RiskSpec& spec = RiskTable::specs()[s];
        const int ell = estimator_components(spec);
        const auto m0 = static_cast<std::ptrdiff_t>(errors_class0.size());
        const auto m1 = static_cast<std::ptrdiff_t>(errors_class1.size());
        if (m0 <= ell || m1 <= ell) {
            throw std::invalid_argument("sample too small for a confidence interval");
        }
        const double sd0 =
            bootstrap_sd(errors_class0, spec, bootstrap_samples, mix_seed(seed, 2 * s));
        const double sd1 =
            bootstrap_sd(errors_class1, spec, bootstrap_samples, mix_seed(seed, 2 * s + 1));
        const double df0 = static_cast<double>(m0 - ell);
        const double df1 = static_cast<double>(m1 - ell);

        auto fill = [&](RiskCell& cell, double sd, double df) {
            cell.has_ci = true;
            if (sd == 0.0) {
                cell.ci_lo = cell.ci_hi = cell.value;
                return;
            }
            const double t = t_quantile(df, confidence);
            cell.ci_lo = cell.value - t * sd;
            cell.ci_hi = cell.value + t * sd;
        };
        fill(table.class0[s], sd0, df0);
        fill(table.class1[s], sd1, df1);

        // Total row: variances add; degrees of freedom combined by
        // Welch-Satterthwaite.
        const double var_t = sd0 * sd0 + sd1 * sd1;
        double df_t = df0 + df1;
        if (sd0 > 0.0 && sd1 > 0.0) {
            df_t = var_t * var_t /
                (std::pow(sd0, 4) / df0 + std::pow(sd1, 4) / df1);
        }
        fill(table.total[s], std::sqrt(var_t), df_t);
    }
    return table;
}

FoldPlan stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
    const auto m = labels.size();
    if (k < 2 || static_cast<std::size_t>(k) > m) {
        throw std::invalid_argument("fold count must lie in [2, sample size]");
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t r = 0; r < m; ++r) {
        if (labels[r] != 0 && labels[r] != 1) {
            throw std::invalid_argument("labels must be 0 or 1");
        }
        by_class[labels[r]].push_back(r);
    }

    FoldPlan plan;
    plan.k = k;
    plan.fold_of.assign(m, 0);
    std::mt19937_64 gen(seed);
    int counter = 0;
    for (auto& rows : by_class) {
        std::shuffle(rows.begin(), rows.end(), gen);
        for (std::size_t r : rows) {
            plan.fold_of[r] = counter % k;
            ++counter;
        }
    }
    return plan;
}

CrossValidationResult kfold_cross_validate(const LossSpec& spec,
                                           const LabeledDataset& data,
                                           const CrossValidationOptions& options) {
    const std::size_t m = data.rows();
    const FoldPlan plan = stratified_folds(data.labels, options.k, options.seed);

    CrossValidationResult result;
    result.scores.assign(m, 0.0);
    result.labels = data.labels;

    // Each fold writes only its own held-out score slots, so the folds can
    // train concurrently without synchronization and the pooled scores do
    // not depend on scheduling.
    auto run_fold = [&](int fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < m; ++r) {
            (plan.fold_of[r] == fold ? test_rows : train_rows).push_back(r);
        }
        LabeledDataset sub;
        sub.feature_names = data.feature_names;
        sub.labels.reserve(train_rows.size());
        for (std::size_t r : train_rows) {
            sub.labels.push_back(data.labels[r]);
        }
        const std::size_t pos =
            static_cast<std::size_t>(std::count(sub.labels.begin(), sub.labels.end(), 1));
        if (pos == 0 || pos == sub.labels.size()) {
            throw std::runtime_error("fold " + std::to_string(fold) +
                                     " leaves a single-class training set");
        }

        const Standardizer scaler = options.standardize
            ? Standardizer::fit(data.features, train_rows)
            : Standardizer::identity(data.features.cols());

        sub.features.resize(static_cast<Eigen::Index>(train_rows.size()),
                            data.features.cols());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            sub.features.row(static_cast<Eigen::Index>(i)) =
                scaler.apply_row(data.features.row(
                    static_cast<Eigen::Index>(train_rows[i])).transpose());
        }

        const TrainedModel model = train(spec, sub, options.solver);
        const LinearClassifier clf = normalize(model.classifier);
        for (std::size_t r : test_rows) {
            const Eigen::VectorXd x = scaler.apply_row(
                data.features.row(static_cast<Eigen::Index>(r)).transpose());
            result.scores[r] = clf.score(x);
        }
    };

    if (options.parallel_folds && plan.k > 1) {
        std::vector<std::future<void>> folds;
        folds.reserve(static_cast<std::size_t>(plan.k));
        for (int fold = 0; fold < plan.k; ++fold) {
            folds.push_back(std::async(std::launch::async, run_fold, fold));
        }
        for (auto& f : folds) {
            f.get();
        }
    } else {
        for (int fold = 0; fold < plan.k; ++fold) {
            run_fold(fold);
        }
    }

    result.errors.resize(m);
    result.signed_errors.resize(m);
    std::vector<double> errors0, errors1;
    for (std::size_t r = 0; r < m; ++r) {
        result.errors[r] = score_error(result.scores[r], data.labels[r]);
        result.signed_errors[r] = signed_error(result.scores[r], data.labels[r]);
        (data.labels[r] == 0 ? errors0 : errors1).push_back(result.errors[r]);
    }

    EvaluationReport& report = result.report;
    report.counts = confusion_at(result.scores, result.labels, 0.0);
    report.threshold0 = metrics(report.counts);
    report.curve = roc(result.scores, result.labels);
    const EmpiricalDistribution dist0(errors0), dist1(errors1);
    report.table = options.with_ci
        ? risk_table_with_ci(dist0, dist1, options.confidence,
                             options.bootstrap_samples, options.seed)
        : risk_table(dist0, dist1);
    report.folds = options.k;
    report.seed = options.seed;
    report.standardized = options.standardize;
    return result;
}

} // namespace risksvm
