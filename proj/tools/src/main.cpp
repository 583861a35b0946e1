#include "risksvm/dataset.hpp"
#include "risksvm/experiment.hpp"
#include "risksvm/io.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#ifndef RISKSVM_VERSION
#define RISKSVM_VERSION "0.0.0"
#endif

namespace {

using namespace risksvm;

struct CommonOpts {
    std::string config_path;
    std::string dataset;
    std::string label_column;
    std::string positive_label;
    std::string loss;
    std::vector<double> lambda, alpha, alpha1, alpha2, beta, beta1, beta2, kappa, delta;
    int folds = 5;
    std::uint64_t seed = 1;
    bool standardize = true;
    std::string target = "f1";
    double confidence = 0.95;
    int bootstrap_samples = 1000;
    int threads = 0;
    std::map<std::string, CLI::Option*> given;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool grid_axes) {
    o.given["config"] = cmd->add_option(
        "--config", o.config_path, "JSON experiment description; flags override its fields");
    o.given["dataset"] = cmd->add_option("--dataset", o.dataset, "CSV file with a header row");
    o.given["label-column"] =
        cmd->add_option("--label-column", o.label_column, "name of the label column");
    o.given["positive-label"] = cmd->add_option(
        "--positive-label", o.positive_label, "label value mapped to class 1");
    o.given["loss"] = cmd->add_option(
        "--loss", o.loss,
        "exp_val, huber, joint_cvar, asym_risk, one_cvar, risk_cvar, two_risk, or two_cvar");

    const char* plural = grid_axes ? "(s)" : "";
    auto axis = [&](const char* flag, std::vector<double>& dst, const std::string& what) {
        CLI::Option* opt = cmd->add_option(flag, dst, what + plural);
        if (!grid_axes) {
            opt->expected(1);
        }
        o.given[flag + 2] = opt; // key without the leading dashes
    };
    axis("--lambda", o.lambda, "class-0 risk weight in (0,1)");
    axis("--alpha", o.alpha, "pooled tail mass");
    axis("--alpha1", o.alpha1, "class-0 tail mass");
    axis("--alpha2", o.alpha2, "class-1 tail mass");
    axis("--beta", o.beta, "expectation weight");
    axis("--beta1", o.beta1, "class-0 expectation weight");
    axis("--beta2", o.beta2, "class-1 expectation weight");
    axis("--kappa", o.kappa, "semideviation penalty in [0,1]");
    axis("--delta", o.delta, "weight-norm regularization");

    o.given["folds"] = cmd->add_option("--folds", o.folds, "cross-validation folds");
    o.given["seed"] = cmd->add_option("--seed", o.seed, "fold and bootstrap seed");
    o.given["standardize"] = cmd->add_flag(
        "--standardize,!--no-standardize", o.standardize,
        "z-score features with training-fold statistics");
    o.given["target"] = cmd->add_option("--target", o.target, "selection metric: f1 or auc");
    o.given["confidence"] =
        cmd->add_option("--confidence", o.confidence, "level for risk-table intervals");
    o.given["bootstrap-samples"] = cmd->add_option(
        "--bootstrap-samples", o.bootstrap_samples, "bootstrap replicates per interval");
    o.given["threads"] =
        cmd->add_option("--threads", o.threads, "grid worker threads; 0 = hardware count");
}

ExperimentConfig merge(const CommonOpts& o) {
    ExperimentConfig c;
    const auto set = [&](const char* key) { return o.given.at(key)->count() > 0; };
    if (set("config")) {
        c = load_config(o.config_path);
    }
    if (set("dataset")) c.dataset = o.dataset;
    if (set("label-column")) c.label_column = o.label_column;
    if (set("positive-label")) c.positive_label = o.positive_label;
    if (set("loss")) c.loss = o.loss;
    if (set("lambda")) c.lambda = o.lambda;
    if (set("alpha")) c.alpha = o.alpha;
    if (set("alpha1")) c.alpha1 = o.alpha1;
    if (set("alpha2")) c.alpha2 = o.alpha2;
    if (set("beta")) c.beta = o.beta;
    if (set("beta1")) c.beta1 = o.beta1;
    if (set("beta2")) c.beta2 = o.beta2;
    if (set("kappa")) c.kappa = o.kappa;
    if (set("delta")) c.delta = o.delta;
    if (set("folds")) c.folds = o.folds;
    if (set("seed")) c.seed = o.seed;
    if (set("standardize")) c.standardize = o.standardize;
    if (set("target")) c.target = target_metric_from_string(o.target);
    if (set("confidence")) c.confidence = o.confidence;
    if (set("bootstrap-samples")) c.bootstrap_samples = o.bootstrap_samples;
    if (set("threads")) c.threads = o.threads;

    if (c.dataset.empty()) throw std::invalid_argument("no dataset given");
    if (c.label_column.empty()) throw std::invalid_argument("no label column given");
    if (c.positive_label.empty()) throw std::invalid_argument("no positive label given");
    if (c.loss.empty()) throw std::invalid_argument("no loss given");
    if (c.folds < 2) throw std::invalid_argument("folds must be at least 2");
    if (c.threads < 0) throw std::invalid_argument("threads must be nonnegative");
    return c;
}

LossSpec single_point(const ExperimentConfig& config) {
    const std::vector<LossSpec> grid = parameter_grid(config);
    if (grid.size() != 1) {
        throw std::invalid_argument("this command needs a single parameter point; the grid has " +
                                    std::to_string(grid.size()));
    }
    return grid.front();
}

LabeledDataset load_dataset(const ExperimentConfig& config) {
    LabeledDataset data = ingest(config.dataset, config.label_column, config.positive_label);
    for (const std::string& w : data.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return data;
}

// Full-dataset standardization for the single-model commands (cross
// validation fits its own per-fold statistics instead).
void standardize_in_place(LabeledDataset& data) {
    std::vector<std::size_t> rows(data.rows());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r] = r;
    }
    data.features = Standardizer::fit(data.features, rows).apply(data.features);
}

void print_risk_table(std::ostream& out, const RiskTable& table) {
    out << "risk table (out-of-sample errors)\n";
    out << std::left << std::setw(12) << "measure" << std::setw(38) << "class0"
        << std::setw(38) << "class1" << "total\n";
    const std::pair<const char*, const std::array<RiskCell, 5>*> rows[] = {
        {"class0", &table.class0}, {"class1", &table.class1}, {"total", &table.total}};
    for (std::size_t s = 0; s < RiskTable::names().size(); ++s) {
        out << std::left << std::setw(12) << RiskTable::names()[s];
        for (const auto& [name, cells] : rows) {
            (void)name;
            const RiskCell& cell = (*cells)[s];
            std::string text = format_number(cell.value);
            if (cell.has_ci) {
                text += " [" + format_number(cell.ci_lo) + ", " +
                        format_number(cell.ci_hi) + "]";
            }
            out << std::setw(38) << text;
        }
        out << '\n';
    }
}

void print_report(std::ostream& out, const CrossValidationResult& cv) {
    const EvaluationReport& r = cv.report;
    out << "records " << cv.scores.size() << "  folds " << r.folds << "  seed " << r.seed
        << "  standardize " << (r.standardized ? "on" : "off") << '\n';
    out << "confusion at threshold 0: tp " << r.counts.tp << "  fp " << r.counts.fp
        << "  tn " << r.counts.tn << "  fn " << r.counts.fn << '\n';
    out << "f1 " << format_number(r.threshold0.f1) << "  precision "
        << format_number(r.threshold0.precision) << "  recall "
        << format_number(r.threshold0.recall) << "  fpr "
        << format_number(r.threshold0.fpr) << '\n';
    out << "auc " << format_number(r.curve.auc) << "  best-f1 "
        << format_number(r.curve.best_f1) << " at threshold "
        << format_number(r.curve.best_f1_threshold) << '\n';
    print_risk_table(out, r.table);
}

int cmd_train(const CommonOpts& o, const std::string& model_out) {
    const ExperimentConfig config = merge(o);
    const LossSpec spec = single_point(config);
    LabeledDataset data = load_dataset(config);
    if (config.standardize) {
        standardize_in_place(data);
    }
    const TrainedModel model = train(spec, data);
    std::cout << "status " << to_string(model.status) << '\n'
              << "objective " << format_number(model.objective) << '\n'
              << "gamma " << format_number(model.classifier.gamma) << '\n'
              << "weight norm " << format_number(model.classifier.v.norm()) << '\n';
    if (!model_out.empty()) {
        std::ofstream file(model_out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot write " + model_out);
        }
        file << model_to_json(model);
    }
    return model.status == SolveStatus::optimal ? 0 : 3;
}

int cmd_evaluate(const CommonOpts& o, const std::string& out_dir) {
    const ExperimentConfig config = merge(o);
    const LossSpec spec = single_point(config);
    const LabeledDataset data = load_dataset(config);
    const CrossValidationResult cv = evaluate_row(config, spec, data);
    print_report(std::cout, cv);
    if (!out_dir.empty()) {
        SweepResult single;
        single.config = config;
        SweepRow row;
        row.spec = spec;
        row.ok = true;
        row.counts = cv.report.counts;
        row.threshold0 = cv.report.threshold0;
        row.auc = cv.report.curve.auc;
        row.best_f1 = cv.report.curve.best_f1;
        row.best_f1_threshold = cv.report.curve.best_f1_threshold;
        row.table = cv.report.table;
        single.rows.push_back(row);
        single.best = 0;
        write_report(single, data, out_dir, true);
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& out_dir, bool full_report) {
    const ExperimentConfig config = merge(o);
    const LabeledDataset data = load_dataset(config);
    const SweepResult result = run_sweep(config, data);

    std::size_t failures = 0;
    for (const SweepRow& row : result.rows) {
        if (!row.ok) {
            ++failures;
        }
    }
    std::cout << "grid points " << result.rows.size() << "  failures " << failures << '\n';
    const bool has_best = write_report(result, data, out_dir, full_report);
    if (!has_best) {
        std::cerr << "no grid point produced a model\n";
        return 3;
    }
    const SweepRow& best = result.rows[static_cast<std::size_t>(result.best)];
    std::cout << "best " << to_string(config.target) << ' '
              << format_number(best.target_value(config.target)) << " at grid index "
              << result.best << '\n';
    std::cout << "wrote " << out_dir << '\n';
    return 0;
}

int cmd_export_qp(const CommonOpts& o, const std::string& out_path) {
    const ExperimentConfig config = merge(o);
    const LossSpec spec = single_point(config);
    LabeledDataset data = load_dataset(config);
    if (config.standardize) {
        standardize_in_place(data);
    }
    const QuadraticProgram qp = build(spec, data);
    if (out_path.empty() || out_path == "-") {
        export_qp(qp, std::cout);
    } else {
        std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot write " + out_path);
        }
        export_qp(qp, file);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-averse binary linear classifier design"};
    app.set_version_flag("--version", std::string(RISKSVM_VERSION));
    app.require_subcommand(1);

    CommonOpts train_opts, eval_opts, sweep_opts, report_opts, export_opts;
    std::string model_out, eval_out, sweep_out, report_out, export_out;

    CLI::App* train_cmd =
        app.add_subcommand("train", "fit one model on the whole dataset");
    add_common(train_cmd, train_opts, false);
    train_cmd->add_option("--model-out", model_out, "write the model as JSON");

    CLI::App* eval_cmd = app.add_subcommand(
        "evaluate", "cross-validate one parameter point and print its report");
    add_common(eval_cmd, eval_opts, false);
    eval_cmd->add_option("--out", eval_out, "also write report files to this directory");

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "cross-validate a parameter grid; write metrics.csv and manifest.json");
    add_common(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();

    CLI::App* report_cmd = app.add_subcommand(
        "report", "run a sweep and write the full report file set for the best row");
    add_common(report_cmd, report_opts, true);
    report_cmd->add_option("--out", report_out, "output directory")->required();

    CLI::App* export_cmd =
        app.add_subcommand("export-qp", "write a loss formulation's QP as text");
    add_common(export_cmd, export_opts, false);
    export_cmd->add_option("--out", export_out, "output file; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_opts, model_out);
        if (eval_cmd->parsed()) return cmd_evaluate(eval_opts, eval_out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_out, false);
        if (report_cmd->parsed()) return cmd_sweep(report_opts, report_out, true);
        if (export_cmd->parsed()) return cmd_export_qp(export_opts, export_out);
    } catch (const SolverError& ex) {
        std::cerr << "solver failure: " << ex.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "usage error: " << ex.what() << '\n';
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "data error: " << ex.what() << '\n';
        return 2;
    }
    return 1;
}
