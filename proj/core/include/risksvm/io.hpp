#pragma once

#include "risksvm/experiment.hpp"

#include <iosfwd>
#include <string>

namespace risksvm {

// Fixed rendering for every number we emit, so reruns with the same inputs
// produce byte-identical files. Infinities become "inf"/"-inf".
std::string format_number(double x);

// JSON experiment description with kebab-case keys mirroring the CLI flags:
// dataset, label-column, positive-label, loss, folds, seed, standardize,
// target, confidence, bootstrap-samples, threads, and a "grid" object whose
// axes (lambda, alpha, alpha1, alpha2, beta, beta1, beta2, kappa, delta) are
// arrays of numbers or {"from", "to", "step"} ranges. Unknown keys are
// rejected. Throws std::invalid_argument on malformed input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Writes metrics.csv (one row per grid point, failures included) and
// manifest.json into out_dir. With full_report set and a selected row
// present, also writes risk_table.csv, roc_points.csv,
// error_distribution.csv, and implied_measure.csv for that row, re-running
// its cross-validation with confidence intervals. An empty grid produces the
// manifest alone. Returns whether a selected row exists.
bool write_report(const SweepResult& sweep, const LabeledDataset& data,
                  const std::string& out_dir, bool full_report);

// Plain-text QP dump: one "<matrix> <row> <col> <value>" line per stored
// entry of P (upper triangle), A, and the nonzeros of q; bound vectors l and
// u list every row. Vector lines use column 0. A comment header records the
// dimensions and the named variable blocks.
void export_qp(const QuadraticProgram& qp, std::ostream& out);

// JSON rendering of a trained model (weights, offset, objective, status,
// loss parameters).
std::string model_to_json(const TrainedModel& model);

} // namespace risksvm
