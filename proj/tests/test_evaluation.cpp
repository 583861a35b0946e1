#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "risksvm/evaluation.hpp"
#include "risksvm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>
#include <vector>

using risksvm::ConfusionCounts;
using risksvm::EmpiricalDistribution;
using risksvm::LabeledDataset;
using risksvm::LossKind;
using risksvm::LossSpec;
using risksvm::RiskSpec;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("risksvm_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::vector<double> random_scores(std::mt19937_64& rng, int n, bool with_ties) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> scores(n);
    for (double& s : scores) {
        s = normal(rng);
        if (with_ties) {
            s = std::round(s * 4.0) / 4.0; // quarter grid forces duplicates
        }
    }
    return scores;
}

LossSpec plain_spec(double delta = 0.05) {
    LossSpec spec;
    spec.kind = LossKind::exp_val;
    spec.delta = delta;
    return spec;
}

} // namespace

TEST_SUITE("confusion metrics") {

TEST_CASE("rates from pinned counts") {
    ConfusionCounts wdbc{197, 21, 336, 15};
    const auto m = risksvm::metrics(wdbc);
    CHECK(m.fpr == doctest::Approx(21.0 / 357.0));
    CHECK(std::abs(m.fpr - 0.05882) <= 5e-6);
    CHECK(std::abs(m.recall - 0.92925) <= 5e-6);
    CHECK(std::abs(m.f1 - 0.91628) <= 5e-6);
    CHECK(m.f1 == doctest::Approx(394.0 / 430.0));

    ConfusionCounts perfect{10, 0, 10, 0};
    const auto p = risksvm::metrics(perfect);
    CHECK(p.fpr == 0.0);
    CHECK(p.recall == 1.0);
    CHECK(p.precision == 1.0);
    CHECK(p.f1 == 1.0);
}

TEST_CASE("no positive predictions flags undefined precision") {
    ConfusionCounts none{0, 0, 8, 4};
    const auto m = risksvm::metrics(none);
    CHECK_FALSE(m.precision_defined);
    CHECK(m.f1 == 0.0);
    CHECK_THROWS_AS(risksvm::metrics(ConfusionCounts{}), std::invalid_argument);
}

TEST_CASE("threshold keeps the boundary in the positive class") {
    const std::vector<double> scores = {-1.0, 0.0, 1.0};
    const std::vector<int> labels = {0, 1, 1};
    const auto counts = risksvm::confusion_at(scores, labels, 0.0);
    CHECK(counts.tp == 2);
    CHECK(counts.tn == 1);
    CHECK(counts.fp == 0);
    CHECK(counts.fn == 0);
}

} // TEST_SUITE

TEST_SUITE("roc curve") {

TEST_CASE("pinned four-point sweep") {
    const std::vector<double> scores = {0.1, 0.4, 0.35, 0.8};
    const std::vector<int> labels = {0, 0, 1, 1};
    const auto curve = risksvm::roc(scores, labels);
    CHECK(curve.auc == doctest::Approx(0.75));
    CHECK(curve.points.size() == 4 + 2);
    CHECK(curve.points.front().threshold == -risksvm::kInf);
    CHECK(curve.points.back().threshold == risksvm::kInf);
}

TEST_CASE("perfect separation and constant scores") {
    const auto perfect =
        risksvm::roc({-2.0, -1.0, 1.0, 2.0}, {0, 0, 1, 1});
    CHECK(perfect.auc == doctest::Approx(1.0));
    CHECK(perfect.best_f1 == doctest::Approx(1.0));

    const auto coin = risksvm::roc({0.5, 0.5, 0.5, 0.5}, {0, 0, 1, 1});
    CHECK(coin.auc == doctest::Approx(0.5));
}

TEST_CASE("f1 ties resolve to the smallest threshold") {
    // Scores sorted ascending carry labels 1,1,0,0: predicting everything
    // (threshold -inf) and nothing below the smallest score tie at F1 = 2/3,
    // and no other threshold beats that.
    const auto curve = risksvm::roc({1.0, 2.0, 3.0, 4.0}, {1, 1, 0, 0});
    CHECK(curve.best_f1 == doctest::Approx(2.0 / 3.0));
    CHECK(curve.best_f1_threshold == -risksvm::kInf);
}

TEST_CASE("one-class input is rejected") {
    CHECK_THROWS_AS(risksvm::roc({1.0, 2.0}, {1, 1}), std::invalid_argument);
}

TEST_CASE("trapezoid area equals the pairwise statistic") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 40)(rng);
        std::vector<int> labels(n);
        int positives = 0;
        for (int& l : labels) {
            l = std::uniform_int_distribution<int>(0, 1)(rng);
            positives += l;
        }
        if (positives == 0 || positives == n) {
            labels[0] = 1 - labels[0];
        }
        const auto scores = random_scores(rng, n, trial % 2 == 0);
        const auto curve = risksvm::roc(scores, labels);
        CHECK(std::abs(curve.auc - oracle::mann_whitney_auc(scores, labels)) <=
              1e-9);
    }
}

} // TEST_SUITE

TEST_SUITE("risk table") {

TEST_CASE("fixed reporting measures") {
    const auto& names = risksvm::RiskTable::names();
    CHECK(std::string(names[0]) == "expectation");
    CHECK(std::string(names[1]) == "msd_1");
    CHECK(std::string(names[2]) == "avar_0.75");
    CHECK(std::string(names[3]) == "avar_0.85");
    CHECK(std::string(names[4]) == "avar_0.95");
}

TEST_CASE("all-correct model reports zero everywhere") {
    const EmpiricalDistribution zeros0(std::vector<double>(5, 0.0));
    const EmpiricalDistribution zeros1(std::vector<double>(7, 0.0));
    const auto table = risksvm::risk_table(zeros0, zeros1);
    for (std::size_t c = 0; c < 5; ++c) {
        CHECK(table.class0[c].value == 0.0);
        CHECK(table.class1[c].value == 0.0);
        CHECK(table.total[c].value == 0.0);
    }
}

TEST_CASE("totals add the class rows and tails dominate the mean") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> err(0.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> e0(8);
        std::vector<double> e1(6);
        for (double& e : e0) {
            e = err(rng);
        }
        for (double& e : e1) {
            e = err(rng);
        }
        const auto table = risksvm::risk_table(EmpiricalDistribution(e0),
                                               EmpiricalDistribution(e1));
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(table.total[c].value ==
                  doctest::Approx(table.class0[c].value + table.class1[c].value));
            CHECK(table.class0[c].value >= 0.0);
        }
        // AVaR at smaller tail mass averages a harder tail.
        CHECK(table.class0[2].value >= table.class0[3].value - 1e-12);
        CHECK(table.class0[3].value >= table.class0[4].value - 1e-12);
        CHECK(table.class0[4].value >= table.class0[0].value - 1e-12);
    }
}

} // TEST_SUITE

TEST_SUITE("confidence intervals") {

TEST_CASE("constant errors give a zero-width interval") {
    const EmpiricalDistribution constant(std::vector<double>(12, 0.75));
    const auto ci = risksvm::confidence_interval(
        constant, RiskSpec::expectation(), 0.95, 200, 7);
    CHECK(ci.lo == doctest::Approx(0.75));
    CHECK(ci.hi == doctest::Approx(0.75));
}

TEST_CASE("expectation interval tracks the classical t-interval") {
    std::mt19937_64 rng(63);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int m = 200;
    std::vector<double> sample(m);
    double sum = 0.0;
    for (double& s : sample) {
        s = normal(rng);
        sum += s;
    }
    const double mean = sum / m;
    double var = 0.0;
    for (double s : sample) {
        var += (s - mean) * (s - mean);
    }
    var /= m - 1;
    const double classical_half = 1.9720 * std::sqrt(var / m); // t_{0.975,199}

    const auto ci = risksvm::confidence_interval(
        EmpiricalDistribution(sample), RiskSpec::expectation(), 0.95, 4000, 9);
    const double half = 0.5 * (ci.hi - ci.lo);
    CHECK(std::abs(half - classical_half) <= 0.15 * classical_half);
    CHECK(0.5 * (ci.hi + ci.lo) == doctest::Approx(mean));
}

TEST_CASE("wider confidence nests the narrower interval") {
    std::mt19937_64 rng(64);
    std::normal_distribution<double> normal(1.0, 0.5);
    std::vector<double> sample(40);
    for (double& s : sample) {
        s = normal(rng);
    }
    const EmpiricalDistribution dist(sample);
    const auto spec = RiskSpec::average_value_at_risk(0.5);
    const auto narrow = risksvm::confidence_interval(dist, spec, 0.90, 500, 3);
    const auto wide = risksvm::confidence_interval(dist, spec, 0.99, 500, 3);
    CHECK(wide.lo <= narrow.lo);
    CHECK(wide.hi >= narrow.hi);
}

TEST_CASE("quantile reporting has no interval estimator") {
    const EmpiricalDistribution dist(std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS(risksvm::confidence_interval(dist, RiskSpec::value_at_risk(0.5),
                                                 0.95, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("sample must exceed the estimator count") {
    const EmpiricalDistribution tiny(std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(risksvm::confidence_interval(
                        tiny, RiskSpec::mean_semideviation(1.0), 0.95, 100, 1),
                    std::invalid_argument);
    CHECK_NOTHROW(risksvm::confidence_interval(
        EmpiricalDistribution(std::vector<double>{1.0, 2.0, 3.0}),
        RiskSpec::mean_semideviation(1.0), 0.95, 100, 1));
}

TEST_CASE("same seed reproduces the interval") {
    std::mt19937_64 rng(65);
    std::normal_distribution<double> normal(0.5, 0.2);
    std::vector<double> sample(30);
    for (double& s : sample) {
        s = normal(rng);
    }
    const EmpiricalDistribution dist(sample);
    const auto spec = RiskSpec::convex_combo(0.6, 0.8);
    const auto first = risksvm::confidence_interval(dist, spec, 0.95, 400, 11);
    const auto second = risksvm::confidence_interval(dist, spec, 0.95, 400, 11);
    CHECK(first.lo == second.lo);
    CHECK(first.hi == second.hi);
}

} // TEST_SUITE

TEST_SUITE("stratified folds") {

TEST_CASE("per-fold class proportions stay within one sample") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 30; ++trial) {
        const int m0 = std::uniform_int_distribution<int>(10, 60)(rng);
        const int m1 = std::uniform_int_distribution<int>(10, 60)(rng);
        const int k = std::uniform_int_distribution<int>(2, 8)(rng);
        std::vector<int> labels(m0, 0);
        labels.insert(labels.end(), m1, 1);
        std::shuffle(labels.begin(), labels.end(), rng);

        const auto plan = risksvm::stratified_folds(labels, k, trial);
        REQUIRE(plan.fold_of.size() == labels.size());
        std::vector<std::array<int, 2>> counts(k, {0, 0});
        for (std::size_t r = 0; r < labels.size(); ++r) {
            REQUIRE(plan.fold_of[r] >= 0);
            REQUIRE(plan.fold_of[r] < k);
            ++counts[plan.fold_of[r]][labels[r]];
        }
        for (int label = 0; label < 2; ++label) {
            int lo = 1 << 30;
            int hi = 0;
            for (int f = 0; f < k; ++f) {
                lo = std::min(lo, counts[f][label]);
                hi = std::max(hi, counts[f][label]);
            }
            CHECK(hi - lo <= 1);
        }
    }
}

TEST_CASE("deterministic for a fixed seed") {
    std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0};
    const auto a = risksvm::stratified_folds(labels, 4, 99);
    const auto b = risksvm::stratified_folds(labels, 4, 99);
    CHECK(a.fold_of == b.fold_of);
    const auto c = risksvm::stratified_folds(labels, 4, 100);
    CHECK(a.fold_of != c.fold_of);
}

TEST_CASE("fold counts outside [2, m] are rejected") {
    std::vector<int> labels = {0, 1, 0, 1};
    CHECK_THROWS_AS(risksvm::stratified_folds(labels, 1, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(risksvm::stratified_folds(labels, 5, 0),
                    std::invalid_argument);
    CHECK_NOTHROW(risksvm::stratified_folds(labels, 4, 0));
}

} // TEST_SUITE

TEST_SUITE("cross-validation") {

TEST_CASE("leave-one-out pools one prediction per record") {
    std::mt19937_64 rng(67);
    const auto data = oracle::gaussian_toy(rng, 5, 5, 2, 1.5);
    risksvm::CrossValidationOptions options;
    options.k = 10;
    options.with_ci = false;
    const auto result = risksvm::kfold_cross_validate(plain_spec(), data, options);
    REQUIRE(result.scores.size() == 10);
    REQUIRE(result.errors.size() == 10);
    for (double s : result.scores) {
        CHECK(std::isfinite(s));
    }
    CHECK(result.report.counts.total() == 10);
}

TEST_CASE("same seed gives bit-identical pooled scores") {
    std::mt19937_64 rng(68);
    const auto data = oracle::gaussian_toy(rng, 12, 12, 3, 0.8);
    risksvm::CrossValidationOptions options;
    options.k = 4;
    options.seed = 21;
    options.with_ci = false;
    const auto a = risksvm::kfold_cross_validate(plain_spec(), data, options);
    const auto b = risksvm::kfold_cross_validate(plain_spec(), data, options);
    CHECK(a.scores == b.scores);
    CHECK(a.report.threshold0.f1 == b.report.threshold0.f1);
    CHECK(a.report.curve.auc == b.report.curve.auc);
}

TEST_CASE("parallel and sequential fold execution agree exactly") {
    std::mt19937_64 rng(69);
    const auto data = oracle::gaussian_toy(rng, 10, 14, 2, 0.7);
    risksvm::CrossValidationOptions serial;
    serial.k = 4;
    serial.with_ci = false;
    serial.parallel_folds = false;
    auto parallel = serial;
    parallel.parallel_folds = true;
    const auto a = risksvm::kfold_cross_validate(plain_spec(), data, serial);
    const auto b = risksvm::kfold_cross_validate(plain_spec(), data, parallel);
    CHECK(a.scores == b.scores);
}

TEST_CASE("pooled scores reproduce a manual per-fold pipeline") {
    std::mt19937_64 rng(70);
    const auto data = oracle::gaussian_toy(rng, 9, 9, 2, 0.8);
    risksvm::CrossValidationOptions options;
    options.k = 3;
    options.seed = 5;
    options.with_ci = false;
    const auto spec = plain_spec();
    const auto result = risksvm::kfold_cross_validate(spec, data, options);

    const auto plan = risksvm::stratified_folds(data.labels, options.k, options.seed);
    for (int fold = 0; fold < options.k; ++fold) {
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < data.rows(); ++r) {
            if (plan.fold_of[r] != fold) {
                train_rows.push_back(r);
            }
        }
        const auto stats = risksvm::Standardizer::fit(data.features, train_rows);
        LabeledDataset train;
        train.features.resize(static_cast<Eigen::Index>(train_rows.size()),
                              data.features.cols());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            train.features.row(static_cast<Eigen::Index>(i)) =
                stats.apply_row(data.features.row(
                    static_cast<Eigen::Index>(train_rows[i])).transpose());
            train.labels.push_back(data.labels[train_rows[i]]);
        }
        train.feature_names = data.feature_names;
        const auto model = risksvm::train(spec, train, options.solver);
        const auto clf = risksvm::normalize(model.classifier);
        for (std::size_t r = 0; r < data.rows(); ++r) {
            if (plan.fold_of[r] == fold) {
                const double score = clf.score(stats.apply_row(
                    data.features.row(static_cast<Eigen::Index>(r)).transpose()));
                CHECK(std::abs(score - result.scores[r]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("a fold that would strip one class from training is rejected") {
    LabeledDataset data;
    data.features.resize(4, 1);
    data.features << 0.0, 1.0, 2.0, 5.0;
    data.labels = {0, 0, 0, 1};
    data.feature_names = {"f0"};
    risksvm::CrossValidationOptions options;
    options.k = 2;
    options.with_ci = false;
    CHECK_THROWS_WITH_AS(risksvm::kfold_cross_validate(plain_spec(), data, options),
                         doctest::Contains("single-class"), std::runtime_error);
}

} // TEST_SUITE

TEST_SUITE("experiment sweeps") {

TEST_CASE("the grid spans only the axes the loss reads") {
    risksvm::ExperimentConfig config;
    config.loss = "exp_val";
    config.lambda = {0.3, 0.5}; // ignored by exp_val
    config.delta = {0.1, 0.2, 0.3};
    CHECK(risksvm::parameter_grid(config).size() == 3);

    config.loss = "risk_cvar";
    config.beta = {0.5};
    config.alpha2 = {0.6, 0.8};
    const auto grid = risksvm::parameter_grid(config);
    CHECK(grid.size() == 2 * 2 * 3); // lambda x alpha2 x delta

    // lambda is the slowest axis, delta the fastest.
    CHECK(*grid[0].lambda == doctest::Approx(0.3));
    CHECK(*grid[0].alpha2 == doctest::Approx(0.6));
    CHECK(grid[0].delta == doctest::Approx(0.1));
    CHECK(grid[1].delta == doctest::Approx(0.2));
    CHECK(*grid[grid.size() - 1].lambda == doctest::Approx(0.5));
}

TEST_CASE("axes are deduplicated, sorted, and required when the loss reads them") {
    risksvm::ExperimentConfig config;
    config.loss = "two_risk";
    config.lambda = {0.7, 0.3, 0.7};
    config.delta = {0.1};
    const auto grid = risksvm::parameter_grid(config);
    REQUIRE(grid.size() == 2);
    CHECK(*grid[0].lambda == doctest::Approx(0.3));
    CHECK(*grid[1].lambda == doctest::Approx(0.7));

    config.lambda.clear();
    CHECK_THROWS_AS(risksvm::parameter_grid(config), std::invalid_argument);
}

TEST_CASE("a one-point sweep matches a direct cross-validation call") {
    std::mt19937_64 rng(71);
    const auto data = oracle::gaussian_toy(rng, 10, 10, 2, 0.9);
    risksvm::ExperimentConfig config;
    config.loss = "exp_val";
    config.delta = {0.05};
    config.folds = 4;
    config.seed = 3;
    config.threads = 1;
    const auto sweep = risksvm::run_sweep(config, data);
    REQUIRE(sweep.rows.size() == 1);
    REQUIRE(sweep.best == 0);
    REQUIRE(sweep.rows[0].ok);

    risksvm::CrossValidationOptions options;
    options.k = 4;
    options.seed = 3;
    options.with_ci = false;
    options.parallel_folds = false;
    const auto direct = risksvm::kfold_cross_validate(plain_spec(), data, options);
    CHECK(sweep.rows[0].threshold0.f1 ==
          doctest::Approx(direct.report.threshold0.f1));
    CHECK(sweep.rows[0].auc == doctest::Approx(direct.report.curve.auc));
    CHECK(sweep.rows[0].counts.tp == direct.report.counts.tp);
}

TEST_CASE("selection maximizes the target and breaks ties toward the first row") {
    std::mt19937_64 rng(72);
    const auto data = oracle::gaussian_toy(rng, 12, 12, 2, 0.8);
    risksvm::ExperimentConfig config;
    config.loss = "two_risk";
    config.lambda = {0.35, 0.5, 0.65};
    config.delta = {0.05};
    config.folds = 3;
    config.threads = 2;
    const auto sweep = risksvm::run_sweep(config, data);
    REQUIRE(sweep.best >= 0);
    for (const auto& row : sweep.rows) {
        REQUIRE(row.ok);
        CHECK(row.target_value(config.target) <=
              sweep.rows[sweep.best].target_value(config.target));
    }
    const double best_value = sweep.rows[sweep.best].target_value(config.target);
    for (int i = 0; i < sweep.best; ++i) {
        CHECK(sweep.rows[i].target_value(config.target) < best_value);
    }
}

} // TEST_SUITE

TEST_SUITE("number formatting and configs") {

TEST_CASE("stable decimal rendering") {
    CHECK(risksvm::format_number(1.0) == "1");
    CHECK(risksvm::format_number(0.5) == "0.5");
    CHECK(risksvm::format_number(-0.25) == "-0.25");
    CHECK(risksvm::format_number(risksvm::kInf) == "inf");
    CHECK(risksvm::format_number(-risksvm::kInf) == "-inf");
    CHECK(risksvm::format_number(std::nan("")) == "nan");
    CHECK(risksvm::format_number(0.916279069767) == "0.91627907");
    CHECK(risksvm::format_number(0.123456789123) == "0.123456789");
}

TEST_CASE("config json round-trips ranges, arrays, and scalars") {
    const std::string text = R"({
        "dataset": "data/toy.csv",
        "label-column": "label",
        "positive-label": "yes",
        "loss": "risk_cvar",
        "grid": {
            "lambda": {"from": 0.40, "to": 0.70, "step": 0.02},
            "alpha2": [0.75],
            "beta": 0.5,
            "delta": [0.5]
        },
        "folds": 5,
        "seed": 1,
        "standardize": true,
        "bootstrap-samples": 50
    })";
    const auto config = risksvm::parse_config(text);
    REQUIRE(config.lambda.size() == 16);
    CHECK(config.lambda.front() == doctest::Approx(0.40));
    CHECK(config.lambda.back() == doctest::Approx(0.70));
    CHECK(std::abs(config.lambda[10] - 0.60) <= 1e-12); // snapped, not 0.6000000000000001
    CHECK(config.beta == std::vector<double>{0.5});
    CHECK(config.loss == "risk_cvar");
    CHECK(config.bootstrap_samples == 50);
}

TEST_CASE("unknown keys and malformed axes are rejected") {
    CHECK_THROWS_AS(risksvm::parse_config(R"({"verbosity": 3})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(risksvm::parse_config(R"({"grid": {"omega": [1]}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        risksvm::parse_config(R"({"grid": {"lambda": {"from": 1, "to": 0, "step": 0.1}}})"),
        std::invalid_argument);
    CHECK_THROWS_AS(risksvm::parse_config("not json"), std::invalid_argument);
}

} // TEST_SUITE

TEST_SUITE("reports") {

namespace {

risksvm::SweepResult toy_sweep(const LabeledDataset& data) {
    risksvm::ExperimentConfig config;
    config.dataset = "toy";
    config.label_column = "label";
    config.positive_label = "1";
    config.loss = "one_cvar";
    config.lambda = {0.5};
    config.alpha2 = {0.5};
    config.delta = {0.05, 0.1};
    config.folds = 3;
    config.seed = 2;
    config.bootstrap_samples = 200;
    config.threads = 1;
    return risksvm::run_sweep(config, data);
}

} // namespace

TEST_CASE("full report writes every artifact deterministically") {
    std::mt19937_64 rng(73);
    const auto data = oracle::gaussian_toy(rng, 10, 10, 2, 0.8);
    const auto sweep = toy_sweep(data);
    REQUIRE(sweep.best >= 0);

    TempDir first("report_a");
    TempDir second("report_b");
    CHECK(risksvm::write_report(sweep, data, first.path.string(), true));
    CHECK(risksvm::write_report(sweep, data, second.path.string(), true));

    for (const char* name :
         {"metrics.csv", "risk_table.csv", "roc_points.csv",
          "error_distribution.csv", "implied_measure.csv", "manifest.json"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(first.path / name));
        CHECK(slurp(first.path / name) == slurp(second.path / name));
    }

    // One data row per grid point plus the header.
    const auto metrics_text = slurp(first.path / "metrics.csv");
    CHECK(std::count(metrics_text.begin(), metrics_text.end(), '\n') == 3);

    // Sentinel thresholds add two rows beyond the distinct scores.
    const auto roc_text = slurp(first.path / "roc_points.csv");
    const auto result = risksvm::evaluate_row(sweep.config,
                                              sweep.rows[sweep.best].spec, data);
    std::vector<double> distinct = result.scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    CHECK(std::count(roc_text.begin(), roc_text.end(), '\n') ==
          static_cast<std::ptrdiff_t>(distinct.size() + 2 + 1));
}

TEST_CASE("an empty grid still yields a manifest and reports no selection") {
    std::mt19937_64 rng(74);
    const auto data = oracle::gaussian_toy(rng, 6, 6, 2, 0.8);
    risksvm::SweepResult sweep;
    sweep.config.loss = "exp_val";
    TempDir dir("report_empty");
    CHECK_FALSE(risksvm::write_report(sweep, data, dir.path.string(), true));
    CHECK(fs::exists(dir.path / "manifest.json"));
    CHECK_FALSE(fs::exists(dir.path / "roc_points.csv"));
}

TEST_CASE("quadratic slack loss downgrades the implied artifact to a header") {
    std::mt19937_64 rng(75);
    const auto data = oracle::gaussian_toy(rng, 8, 8, 2, 0.8);
    risksvm::ExperimentConfig config;
    config.loss = "huber";
    config.delta = {0.05};
    config.folds = 3;
    config.seed = 2;
    config.bootstrap_samples = 100;
    config.threads = 1;
    const auto sweep = risksvm::run_sweep(config, data);
    REQUIRE(sweep.best >= 0);
    TempDir dir("report_huber");
    CHECK(risksvm::write_report(sweep, data, dir.path.string(), true));
    const auto implied_text = slurp(dir.path / "implied_measure.csv");
    CHECK(std::count(implied_text.begin(), implied_text.end(), '\n') == 1);
    const auto manifest_text = slurp(dir.path / "manifest.json");
    CHECK(manifest_text.find("implied") != std::string::npos);
}

} // TEST_SUITE

TEST_SUITE("qp export and model json") {

TEST_CASE("export lists blocks, entries, and both bounds") {
    std::mt19937_64 rng(76);
    const auto data = oracle::gaussian_toy(rng, 4, 4, 2, 0.8);
    const auto qp = risksvm::build(plain_spec(), data);
    std::ostringstream out;
    risksvm::export_qp(qp, out);
    const std::string text = out.str();

    CHECK(text.find("# vars 11 constraints 16") != std::string::npos);
    CHECK(text.find("# block v 0 2") != std::string::npos);
    CHECK(text.find("# block gamma 2 1") != std::string::npos);

    int p_lines = 0;
    int l_lines = 0;
    int u_lines = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("P ", 0) == 0) {
            ++p_lines;
        } else if (line.rfind("l ", 0) == 0) {
            ++l_lines;
        } else if (line.rfind("u ", 0) == 0) {
            ++u_lines;
        }
    }
    CHECK(p_lines == 2); // the two diagonal weight entries
    CHECK(l_lines == 16);
    CHECK(u_lines == 16);
}

TEST_CASE("model json carries weights and loss parameters") {
    std::mt19937_64 rng(77);
    const auto data = oracle::gaussian_toy(rng, 6, 6, 2, 1.0);
    LossSpec spec;
    spec.kind = LossKind::one_cvar;
    spec.lambda = 0.5;
    spec.alpha2 = 0.5;
    spec.delta = 0.05;
    const auto model = risksvm::train(spec, data);
    const std::string json = risksvm::model_to_json(model);
    CHECK(json.find("\"loss\"") != std::string::npos);
    CHECK(json.find("\"one_cvar\"") != std::string::npos);
    CHECK(json.find("\"gamma\"") != std::string::npos);
    CHECK(json.find("\"alpha2\"") != std::string::npos);
    CHECK(json.find("\"status\"") != std::string::npos);
}

} // TEST_SUITE

TEST_SUITE("dataset ingest") {

TEST_CASE("reference dataset shape") {
    REQUIRE_MESSAGE(fs::exists("data/wdbc.csv"),
                    "run the tests from the repository root");
    const auto data = risksvm::ingest("data/wdbc.csv", "diagnosis", "M");
    CHECK(data.rows() == 569);
    CHECK(data.cols() == 30);
    CHECK(data.count(1) == 212);
    CHECK(data.count(0) == 357);
    CHECK(data.feature_names.size() == 30);
    CHECK(data.warnings.empty());
}

TEST_CASE("two records are enough but flagged") {
    TempDir dir("ingest_tiny");
    const auto file = dir.path / "tiny.csv";
    std::ofstream(file) << "x,y,label\n1.0,2.0,a\n3.0,4.0,b\n";
    const auto data = risksvm::ingest(file.string(), "label", "b");
    CHECK(data.rows() == 2);
    CHECK(data.count(1) == 1);
    REQUIRE_FALSE(data.warnings.empty());
}

TEST_CASE("categorical features are one-hot encoded without the first level") {
    TempDir dir("ingest_onehot");
    const auto file = dir.path / "cat.csv";
    std::ofstream(file) << "color,size,label\n"
                           "red,1.0,0\n"
                           "green,2.0,1\n"
                           "blue,3.0,0\n"
                           "green,4.0,1\n";
    const auto data = risksvm::ingest(file.string(), "label", "1");
    // Colors {blue, green, red} sorted: blue dropped, two indicators kept.
    CHECK(data.cols() == 3);
    bool green_seen = false;
    bool red_seen = false;
    for (const auto& name : data.feature_names) {
        green_seen = green_seen || name.find("green") != std::string::npos;
        red_seen = red_seen || name.find("red") != std::string::npos;
        CHECK(name.find("blue") == std::string::npos);
    }
    CHECK(green_seen);
    CHECK(red_seen);
}

TEST_CASE("ingest failures carry diagnostics") {
    TempDir dir("ingest_bad");
    const auto missing_col = dir.path / "missing.csv";
    std::ofstream(missing_col) << "x,label\n1.0,0\n2.0,1\n";
    CHECK_THROWS_AS(risksvm::ingest(missing_col.string(), "target", "1"),
                    std::runtime_error);

    const auto single_class = dir.path / "single.csv";
    std::ofstream(single_class) << "x,label\n1.0,0\n2.0,0\n";
    CHECK_THROWS_AS(risksvm::ingest(single_class.string(), "label", "1"),
                    std::runtime_error);

    const auto empty_cell = dir.path / "empty.csv";
    std::ofstream(empty_cell) << "x,label\n1.0,0\n,1\n";
    CHECK_THROWS_AS(risksvm::ingest(empty_cell.string(), "label", "1"),
                    std::runtime_error);

    CHECK_THROWS_AS(risksvm::ingest((dir.path / "nope.csv").string(), "label", "1"),
                    std::runtime_error);
}

TEST_CASE("standardizer centers training rows and keeps constants finite") {
    Eigen::MatrixXd features(4, 2);
    features << 1.0, 7.0,
                3.0, 7.0,
                5.0, 7.0,
                9.0, 7.0;
    const std::vector<std::size_t> rows = {0, 1, 2};
    const auto stats = risksvm::Standardizer::fit(features, rows);
    CHECK(stats.mean[0] == doctest::Approx(3.0));
    CHECK(stats.scale[1] == doctest::Approx(1.0)); // constant column
    const auto applied = stats.apply(features);
    CHECK(applied(0, 1) == doctest::Approx(0.0));
    CHECK(applied(1, 0) == doctest::Approx(0.0));
    const double sq = applied.col(0).head(3).squaredNorm();
    CHECK(std::sqrt(sq / 3.0) == doctest::Approx(1.0));
}

} // TEST_SUITE
