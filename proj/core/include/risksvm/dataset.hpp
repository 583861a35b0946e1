#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace risksvm {

struct LabeledDataset {
    Eigen::MatrixXd features; // one row per record
    std::vector<int> labels;  // 0 or 1; class 1 is the positive class
    std::vector<std::string> feature_names;
    std::vector<std::string> warnings; // degenerate-size notes collected at ingest

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t count(int label) const;
};

// Reads an RFC-4180 CSV with a header row. The label column is removed from
// the feature set; records whose label equals positive_label become class 1,
// everything else class 0. Categorical feature columns (any cell that does
// not parse as a number) are one-hot encoded with the first category in
// sorted order dropped. Throws std::runtime_error on unreadable files,
// missing columns, non-finite or empty cells, and single-class data.
LabeledDataset ingest(const std::string& path,
                      const std::string& label_column,
                      const std::string& positive_label);

// Column-wise z-score statistics, fit on a subset of rows (the training
// folds) and applied everywhere. Constant columns keep scale 1 so they map
// to zero instead of dividing by zero.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& features,
                            const std::vector<std::size_t>& rows);
    static Standardizer identity(Eigen::Index cols);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
};

} // namespace risksvm
