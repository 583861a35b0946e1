#include "risksvm/io.hpp"

#include "risksvm/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#ifndef RISKSVM_VERSION
#define RISKSVM_VERSION "0.0.0"
#endif

namespace risksvm {

namespace {

using ordered_json = nlohmann::ordered_json;

// (name, value) view of a loss's parameters; unset optionals stay unset so
// CSV cells and JSON fields can be left empty.
std::vector<std::pair<const char*, std::optional<double>>>
named_params(const LossSpec& spec) {
    return {
        {"lambda", spec.lambda}, {"alpha", spec.alpha},
        {"alpha1", spec.alpha1}, {"alpha2", spec.alpha2},
        {"beta", spec.beta},     {"beta1", spec.beta1},
        {"beta2", spec.beta2},   {"kappa", spec.kappa},
        {"delta", spec.delta},
    };
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return file;
}

} // namespace

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

namespace {

std::vector<double> axis_values(const ordered_json& node, const std::string& name) {
    std::vector<double> values;
    if (node.is_number()) {
        values.push_back(node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number()) {
                throw std::invalid_argument("grid axis " + name + " must hold numbers");
            }
            values.push_back(v.get<double>());
        }
    } else if (node.is_object()) {
        for (const auto& [key, value] : node.items()) {
            if (key != "from" && key != "to" && key != "step") {
                throw std::invalid_argument("grid axis " + name +
                                            ": unknown range key " + key);
            }
            if (!value.is_number()) {
                throw std::invalid_argument("grid axis " + name +
                                            ": range bounds must be numbers");
            }
        }
        if (!node.contains("from") || !node.contains("to") || !node.contains("step")) {
            throw std::invalid_argument("grid axis " + name +
                                        " range needs from, to, and step");
        }
        const double from = node["from"].get<double>();
        const double to = node["to"].get<double>();
        const double step = node["step"].get<double>();
        if (!(step > 0.0) || to < from) {
            throw std::invalid_argument("grid axis " + name + " range is empty");
        }
        for (int i = 0;; ++i) {
            const double v = from + i * step;
            if (v > to + step * 1e-9) {
                break;
            }
            // Snap accumulated floating-point error so two-decimal grids
            // hold exact two-decimal values.
            values.push_back(std::round(v * 1e10) / 1e10);
        }
    } else {
        throw std::invalid_argument("grid axis " + name +
                                    " must be a number, array, or range");
    }
    return values;
}

void parse_grid(const ordered_json& grid, ExperimentConfig& config) {
    if (!grid.is_object()) {
        throw std::invalid_argument("\"grid\" must be an object of axes");
    }
    for (const auto& [key, value] : grid.items()) {
        std::vector<double>* axis = nullptr;
        if (key == "lambda") axis = &config.lambda;
        else if (key == "alpha") axis = &config.alpha;
        else if (key == "alpha1") axis = &config.alpha1;
        else if (key == "alpha2") axis = &config.alpha2;
        else if (key == "beta") axis = &config.beta;
        else if (key == "beta1") axis = &config.beta1;
        else if (key == "beta2") axis = &config.beta2;
        else if (key == "kappa") axis = &config.kappa;
        else if (key == "delta") axis = &config.delta;
        else throw std::invalid_argument("unknown grid axis: " + key);
        *axis = axis_values(value, key);
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& ex) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }

    ExperimentConfig config;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "dataset") config.dataset = value.get<std::string>();
            else if (key == "label-column") config.label_column = value.get<std::string>();
            else if (key == "positive-label") config.positive_label = value.get<std::string>();
            else if (key == "loss") config.loss = value.get<std::string>();
            else if (key == "grid") parse_grid(value, config);
            else if (key == "folds") config.folds = value.get<int>();
            else if (key == "seed") config.seed = value.get<std::uint64_t>();
            else if (key == "standardize") config.standardize = value.get<bool>();
            else if (key == "target")
                config.target = target_metric_from_string(value.get<std::string>());
            else if (key == "confidence") config.confidence = value.get<double>();
            else if (key == "bootstrap-samples") config.bootstrap_samples = value.get<int>();
            else if (key == "threads") config.threads = value.get<int>();
            else throw std::invalid_argument("unknown config key: " + key);
        }
    } catch (const ordered_json::exception& ex) {
        throw std::invalid_argument(std::string("bad config value: ") + ex.what());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::invalid_argument("cannot read config file " + path);
    }
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str());
}

namespace {

ordered_json config_json(const ExperimentConfig& config) {
    ordered_json j;
    j["dataset"] = config.dataset;
    j["label-column"] = config.label_column;
    j["positive-label"] = config.positive_label;
    j["loss"] = config.loss;
    ordered_json grid = ordered_json::object();
    const std::pair<const char*, const std::vector<double>*> axes[] = {
        {"lambda", &config.lambda}, {"alpha", &config.alpha},
        {"alpha1", &config.alpha1}, {"alpha2", &config.alpha2},
        {"beta", &config.beta},     {"beta1", &config.beta1},
        {"beta2", &config.beta2},   {"kappa", &config.kappa},
        {"delta", &config.delta},
    };
    for (const auto& [name, axis] : axes) {
        if (!axis->empty()) {
            grid[name] = *axis;
        }
    }
    j["grid"] = grid;
    j["folds"] = config.folds;
    j["seed"] = config.seed;
    j["standardize"] = config.standardize;
    j["target"] = to_string(config.target);
    j["confidence"] = config.confidence;
    j["bootstrap-samples"] = config.bootstrap_samples;
    j["threads"] = config.threads;
    return j;
}

void write_metrics_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    std::ofstream file = open_for_write(path);
    file << "loss";
    for (const auto& [name, value] : named_params(LossSpec{})) {
        (void)value;
        file << ',' << name;
    }
    file << ",status,error,tp,fp,tn,fn,fpr,recall,precision,precision_defined"
            ",f1,auc,best_f1,best_f1_threshold";
    const char* rows[] = {"class0", "class1", "total"};
    for (const char* row : rows) {
        for (const char* name : RiskTable::names()) {
            file << ",risk_" << row << '_' << name;
        }
    }
    file << '\n';

    for (const SweepRow& row : sweep.rows) {
        file << to_string(row.spec.kind);
        for (const auto& [name, value] : named_params(row.spec)) {
            (void)name;
            file << ',';
            if (value) {
                file << format_number(*value);
            }
        }
        file << ',' << (row.ok ? "ok" : "failed");
        file << ',' << csv_escape(row.error);
        if (!row.ok) {
            for (int i = 0; i < 13 + 15; ++i) {
                file << ',';
            }
            file << '\n';
            continue;
        }
        file << ',' << row.counts.tp << ',' << row.counts.fp << ','
             << row.counts.tn << ',' << row.counts.fn;
        file << ',' << format_number(row.threshold0.fpr)
             << ',' << format_number(row.threshold0.recall)
             << ',' << format_number(row.threshold0.precision)
             << ',' << (row.threshold0.precision_defined ? 1 : 0)
             << ',' << format_number(row.threshold0.f1)
             << ',' << format_number(row.auc)
             << ',' << format_number(row.best_f1)
             << ',' << format_number(row.best_f1_threshold);
        const std::array<RiskCell, 5>* tables[] = {&row.table.class0,
                                                   &row.table.class1,
                                                   &row.table.total};
        for (const auto* cells : tables) {
            for (const RiskCell& cell : *cells) {
                file << ',' << format_number(cell.value);
            }
        }
        file << '\n';
    }
}

void write_risk_table_csv(const std::filesystem::path& path, const RiskTable& table) {
    std::ofstream file = open_for_write(path);
    file << "row,measure,value,ci_lo,ci_hi\n";
    const std::pair<const char*, const std::array<RiskCell, 5>*> rows[] = {
        {"class0", &table.class0}, {"class1", &table.class1}, {"total", &table.total}};
    for (const auto& [name, cells] : rows) {
        for (std::size_t s = 0; s < cells->size(); ++s) {
            const RiskCell& cell = (*cells)[s];
            file << name << ',' << RiskTable::names()[s] << ','
                 << format_number(cell.value) << ',';
            if (cell.has_ci) {
                file << format_number(cell.ci_lo) << ',' << format_number(cell.ci_hi);
            } else {
                file << ',';
            }
            file << '\n';
        }
    }
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
    std::ofstream file = open_for_write(path);
    file << "threshold,fpr,tpr,f1\n";
    for (const RocPoint& p : curve.points) {
        file << format_number(p.threshold) << ',' << format_number(p.fpr) << ','
             << format_number(p.tpr) << ',' << format_number(p.f1) << '\n';
    }
}

void write_error_distribution_csv(const std::filesystem::path& path,
                                  const CrossValidationResult& cv) {
    std::ofstream file = open_for_write(path);
    file << "record,label,score,signed_error\n";
    for (std::size_t r = 0; r < cv.scores.size(); ++r) {
        file << r << ',' << cv.labels[r] << ',' << format_number(cv.scores[r])
             << ',' << format_number(cv.signed_errors[r]) << '\n';
    }
}

void write_implied_csv(const std::filesystem::path& path, const ImpliedMeasure* measure) {
    std::ofstream file = open_for_write(path);
    file << "class,index,weight\n";
    if (measure == nullptr) {
        return;
    }
    for (Eigen::Index j = 0; j < measure->mu0.size(); ++j) {
        file << "0," << j << ',' << format_number(measure->mu0[j]) << '\n';
    }
    for (Eigen::Index j = 0; j < measure->mu1.size(); ++j) {
        file << "1," << j << ',' << format_number(measure->mu1[j]) << '\n';
    }
}

} // namespace

bool write_report(const SweepResult& sweep, const LabeledDataset& data,
                  const std::string& out_dir, bool full_report) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    const ExperimentConfig& config = sweep.config;
    const bool has_best = sweep.best >= 0 &&
        static_cast<std::size_t>(sweep.best) < sweep.rows.size();

    std::size_t failures = 0;
    for (const SweepRow& row : sweep.rows) {
        if (!row.ok) {
            ++failures;
        }
    }

    ordered_json manifest;
    manifest["tool"] = {{"name", "risksvm"}, {"version", RISKSVM_VERSION}};
    manifest["versions"] = {
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__},
    };
    manifest["config"] = config_json(config);
    manifest["dataset"] = {
        {"path", config.dataset},
        {"records", data.rows()},
        {"features", data.cols()},
        {"class0", data.count(0)},
        {"class1", data.count(1)},
        {"warnings", data.warnings},
    };
    manifest["grid"] = {{"points", sweep.rows.size()}, {"failures", failures}};

    ordered_json selection;
    selection["target"] = to_string(config.target);
    if (has_best) {
        const SweepRow& best = sweep.rows[static_cast<std::size_t>(sweep.best)];
        ordered_json chosen;
        chosen["index"] = sweep.best;
        chosen["loss"] = to_string(best.spec.kind);
        for (const auto& [name, value] : named_params(best.spec)) {
            if (value) {
                chosen[name] = *value;
            }
        }
        chosen["f1"] = best.threshold0.f1;
        chosen["auc"] = best.auc;
        chosen["best_f1"] = best.best_f1;
        chosen["best_f1_threshold"] = format_number(best.best_f1_threshold);
        selection["best"] = chosen;
    } else {
        selection["best"] = nullptr;
    }
    manifest["selection"] = selection;
    manifest["protocol"] = {
        {"folds", config.folds},         {"seed", config.seed},
        {"standardize", config.standardize}, {"threshold", 0.0},
        {"confidence", config.confidence},
        {"bootstrap-samples", config.bootstrap_samples},
    };

    if (!sweep.rows.empty()) {
        write_metrics_csv(dir / "metrics.csv", sweep);
    }

    if (full_report && has_best) {
        const LossSpec& spec = sweep.rows[static_cast<std::size_t>(sweep.best)].spec;
        const CrossValidationResult cv = evaluate_row(config, spec, data);
        write_risk_table_csv(dir / "risk_table.csv", cv.report.table);
        write_roc_csv(dir / "roc_points.csv", cv.report.curve);
        write_error_distribution_csv(dir / "error_distribution.csv", cv);

        // The implied measure belongs to one trained model, not to pooled
        // folds: train the selected loss on the full (optionally
        // standardized) dataset and export its weights.
        if (spec.kind == LossKind::huber) {
            write_implied_csv(dir / "implied_measure.csv", nullptr);
            manifest["notes"] = {{"implied-measure",
                                  "not defined for the quadratic slack loss"}};
        } else {
            try {
                std::vector<std::size_t> all_rows(data.rows());
                for (std::size_t r = 0; r < all_rows.size(); ++r) {
                    all_rows[r] = r;
                }
                const Standardizer scaler = config.standardize
                    ? Standardizer::fit(data.features, all_rows)
                    : Standardizer::identity(data.features.cols());
                LabeledDataset full = data;
                full.features = scaler.apply(data.features);
                const TrainedModel model = train(spec, full);
                const ImpliedMeasure measure = implied_weights(model);
                write_implied_csv(dir / "implied_measure.csv", &measure);
            } catch (const std::exception& ex) {
                write_implied_csv(dir / "implied_measure.csv", nullptr);
                manifest["notes"] = {{"implied-measure", ex.what()}};
            }
        }
    }

    std::ofstream file = open_for_write(dir / "manifest.json");
    file << manifest.dump(2) << '\n';
    return has_best;
}

void export_qp(const QuadraticProgram& qp, std::ostream& out) {
    out << "# quadratic program: minimize 0.5 x'Px + q'x subject to l <= Ax <= u\n";
    out << "# vars " << qp.num_vars() << " constraints " << qp.num_constraints() << '\n';
    for (const auto& [name, range] : qp.var_map) {
        out << "# block " << name << ' ' << range.offset << ' ' << range.size << '\n';
    }
    for (int k = 0; k < qp.P.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(qp.P, k); it; ++it) {
            out << "P " << it.row() << ' ' << it.col() << ' '
                << format_number(it.value()) << '\n';
        }
    }
    for (Eigen::Index i = 0; i < qp.q.size(); ++i) {
        if (qp.q[i] != 0.0) {
            out << "q " << i << " 0 " << format_number(qp.q[i]) << '\n';
        }
    }
    for (int k = 0; k < qp.A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(qp.A, k); it; ++it) {
            out << "A " << it.row() << ' ' << it.col() << ' '
                << format_number(it.value()) << '\n';
        }
    }
    for (Eigen::Index i = 0; i < qp.l.size(); ++i) {
        out << "l " << i << " 0 " << format_number(qp.l[i]) << '\n';
    }
    for (Eigen::Index i = 0; i < qp.u.size(); ++i) {
        out << "u " << i << " 0 " << format_number(qp.u[i]) << '\n';
    }
}

std::string model_to_json(const TrainedModel& model) {
    ordered_json j;
    j["v"] = std::vector<double>(model.classifier.v.data(),
                                 model.classifier.v.data() + model.classifier.v.size());
    j["gamma"] = model.classifier.gamma;
    j["objective"] = model.objective;
    j["status"] = to_string(model.status);
    ordered_json loss;
    loss["kind"] = to_string(model.spec.kind);
    for (const auto& [name, value] : named_params(model.spec)) {
        if (value) {
            loss[name] = *value;
        }
    }
    j["loss"] = loss;
    return j.dump(2) + "\n";
}

} // namespace risksvm
