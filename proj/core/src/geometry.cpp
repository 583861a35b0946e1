#include "risksvm/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace risksvm {

double score_error(double normalized_score, int label) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("label must be 0 or 1");
    }
    return label == 1 ? std::max(0.0, -normalized_score)
                      : std::max(0.0, normalized_score);
}

double signed_error(double normalized_score, int label) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("label must be 0 or 1");
    }
    return label == 1 ? -normalized_score : normalized_score;
}

double binary_error(const LinearClassifier& clf, const Eigen::VectorXd& x, int label) {
    const double norm = clf.v.norm();
    if (!(norm > 0.0)) {
        throw std::invalid_argument("classifier direction must be nonzero");
    }
    return score_error(clf.score(x) / norm, label);
}

double orthant_distance(const Eigen::VectorXd& z, int class_index, int num_classes) {
    if (num_classes < 2) {
        throw std::invalid_argument("need at least two classes");
    }
    if (class_index < 1 || class_index > num_classes) {
        throw std::invalid_argument("class index out of range");
    }
    if (z.size() != num_classes - 1) {
        throw std::invalid_argument("score vector must have k - 1 components");
    }
    double sq = 0.0;
    for (Eigen::Index l = 0; l < z.size(); ++l) {
        const bool own_axis = (l + 1 == class_index);
        const double clipped = own_axis ? std::max(0.0, -z[l]) : std::max(0.0, z[l]);
        sq += clipped * clipped;
    }
    return std::sqrt(sq);
}

LinearClassifier normalize(const LinearClassifier& clf) {
    const double norm = clf.v.norm();
    if (!(norm > 0.0)) {
        throw std::invalid_argument("classifier direction must be nonzero");
    }
    return LinearClassifier{clf.v / norm, clf.gamma / norm};
}

} // namespace risksvm
