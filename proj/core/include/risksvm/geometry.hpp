#pragma once

#include <Eigen/Core>

namespace risksvm {

// Linear classifier x -> <v, x> - gamma. Class 1 (positive) is the closed
// half-space score >= 0; class 0 is score < 0.
struct LinearClassifier {
    Eigen::VectorXd v;
    double gamma = 0.0;

    double score(const Eigen::VectorXd& x) const { return v.dot(x) - gamma; }
    int predict(const Eigen::VectorXd& x) const { return score(x) >= 0.0 ? 1 : 0; }
};

// Geometric distance from x to its class region, in margin units: the score
// overshoot on the wrong side divided by ||v||. Zero when the point lies in
// the (closure of) its class half-space. Throws on v = 0.
double binary_error(const LinearClassifier& clf, const Eigen::VectorXd& x, int label);

// Same distance expressed directly on a raw score, for pooled out-of-sample
// evaluation where scores were produced by per-fold classifiers and already
// normalized. Positive label keeps max(0, -score); label 0 keeps max(0, score).
double score_error(double normalized_score, int label);

// Signed error used by the error-distribution report: negative magnitudes are
// correct-side margins, positive ones misclassification distances.
double signed_error(double normalized_score, int label);

// Distance from z in R^(k-1) to the region of class i among k classes, where
// the regions are the orthant sections of the score-difference space. The
// projection is componentwise: class i flips the sign of its own coordinate,
// class k clips all coordinates at zero.
double orthant_distance(const Eigen::VectorXd& z, int class_index, int num_classes);

// Rescales (v, gamma) by 1/||v|| so scores are geometric margins.
LinearClassifier normalize(const LinearClassifier& clf);

} // namespace risksvm
