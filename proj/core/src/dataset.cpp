#include "risksvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace risksvm {

std::size_t LabeledDataset::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

namespace {

// RFC-4180: fields may be quoted; quoted fields may contain commas, newlines,
// and doubled quotes. Returns one record per call, empty optional at EOF.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (!any) {
        return false;
    }
    fields.push_back(std::move(field));
    return true;
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) {
        return false;
    }
    try {
        std::size_t pos = 0;
        out = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        return pos == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

LabeledDataset ingest(const std::string& path,
                      const std::string& label_column,
                      const std::string& positive_label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }

    std::vector<std::string> header;
    if (!read_record(in, header) || header.empty()) {
        throw std::runtime_error("dataset file has no header row: " + path);
    }

    std::ptrdiff_t label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) {
            label_idx = static_cast<std::ptrdiff_t>(i);
            break;
        }
    }
    if (label_idx < 0) {
        throw std::runtime_error("label column '" + label_column + "' not found in " + path);
    }

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) {
            continue; // trailing blank line
        }
        if (fields.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(records.size() + 2) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        }
        records.push_back(fields);
    }
    if (records.empty()) {
        throw std::runtime_error("dataset file has no data rows: " + path);
    }

    const std::size_t m = records.size();
    const std::size_t raw_cols = header.size();

    // An empty cell would silently turn a numeric column categorical (with
    // "" as a level) — reject it instead of guessing what was meant.
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < raw_cols; ++c) {
            if (records[r][c].empty()) {
                throw std::runtime_error("empty cell in column '" + header[c] +
                                         "', row " + std::to_string(r + 2));
            }
        }
    }

    // Column typing: numeric only if every cell parses as a finite number.
    std::vector<bool> numeric(raw_cols, true);
    for (std::size_t c = 0; c < raw_cols; ++c) {
        if (static_cast<std::ptrdiff_t>(c) == label_idx) {
            continue;
        }
        for (std::size_t r = 0; r < m; ++r) {
            double value;
            if (!parse_number(records[r][c], value)) {
                numeric[c] = false;
                break;
            }
        }
    }

    // One-hot category levels in sorted order; the first level is dropped to
    // avoid collinearity with the intercept.
    std::vector<std::vector<std::string>> levels(raw_cols);
    for (std::size_t c = 0; c < raw_cols; ++c) {
        if (static_cast<std::ptrdiff_t>(c) == label_idx || numeric[c]) {
            continue;
        }
        std::set<std::string> seen;
        for (std::size_t r = 0; r < m; ++r) {
            seen.insert(records[r][c]);
        }
        levels[c].assign(seen.begin(), seen.end());
    }

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < raw_cols; ++c) {
        if (static_cast<std::ptrdiff_t>(c) == label_idx) {
            continue;
        }
        if (numeric[c]) {
            feature_names.push_back(header[c]);
        } else {
            for (std::size_t level = 1; level < levels[c].size(); ++level) {
                feature_names.push_back(header[c] + "=" + levels[c][level]);
            }
        }
    }

    LabeledDataset data;
    data.feature_names = feature_names;
    data.features.resize(static_cast<Eigen::Index>(m),
                         static_cast<Eigen::Index>(feature_names.size()));
    data.labels.resize(m);

    for (std::size_t r = 0; r < m; ++r) {
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < raw_cols; ++c) {
            if (static_cast<std::ptrdiff_t>(c) == label_idx) {
                continue;
            }
            if (numeric[c]) {
                double value;
                parse_number(records[r][c], value);
                if (!std::isfinite(value)) {
                    throw std::runtime_error("non-finite value in column '" + header[c] +
                                             "', row " + std::to_string(r + 2));
                }
                data.features(static_cast<Eigen::Index>(r), out_col++) = value;
            } else {
                const auto& cell = records[r][c];
                for (std::size_t level = 1; level < levels[c].size(); ++level) {
                    data.features(static_cast<Eigen::Index>(r), out_col++) =
                        cell == levels[c][level] ? 1.0 : 0.0;
                }
            }
        }
        data.labels[r] = records[r][static_cast<std::size_t>(label_idx)] == positive_label ? 1 : 0;
    }

    const std::size_t positives = data.count(1);
    if (positives == 0 || positives == m) {
        throw std::runtime_error("dataset has a single class; check --positive-label");
    }
    if (positives < 2 || m - positives < 2) {
        data.warnings.push_back("degenerate class size: " + std::to_string(positives) +
                                " positive / " + std::to_string(m - positives) + " negative");
    }
    return data;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features,
                               const std::vector<std::size_t>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("cannot fit standardizer on zero rows");
    }
    const Eigen::Index n = features.cols();
    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(n);
    s.scale = Eigen::VectorXd::Ones(n);
    for (std::size_t r : rows) {
        s.mean += features.row(static_cast<Eigen::Index>(r)).transpose();
    }
    s.mean /= static_cast<double>(rows.size());
    Eigen::VectorXd var = Eigen::VectorXd::Zero(n);
    for (std::size_t r : rows) {
        const Eigen::VectorXd d =
            features.row(static_cast<Eigen::Index>(r)).transpose() - s.mean;
        var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(rows.size());
    for (Eigen::Index c = 0; c < n; ++c) {
        const double sd = std::sqrt(var[c]);
        s.scale[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Standardizer Standardizer::identity(Eigen::Index cols) {
    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(cols);
    s.scale = Eigen::VectorXd::Ones(cols);
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
    Eigen::MatrixXd out = features;
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
}

Eigen::VectorXd Standardizer::apply_row(const Eigen::VectorXd& row) const {
    return (row - mean).cwiseQuotient(scale);
}

} // namespace risksvm
