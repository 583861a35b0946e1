#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <limits>
#include <map>
#include <string>

namespace risksvm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarRange {
    std::size_t offset = 0;
    std::size_t size = 0;
};

// Standard-form convex QP:
//   minimize    (1/2) x' P x + q' x
//   subject to  l <= A x <= u   (componentwise; +/-inf bounds allowed,
//                                l_i == u_i encodes an equality row)
// Only the upper triangle of P is read; storing the full symmetric matrix is
// equally fine. var_map names the index ranges of the decision blocks
// (v, gamma, slacks, epigraph variables, ...) so solutions can be read back
// by name; row_map does the same for constraint-row groups so multipliers
// can be read back too.
struct QuadraticProgram {
    Eigen::SparseMatrix<double> P;
    Eigen::VectorXd q;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd l;
    Eigen::VectorXd u;
    std::map<std::string, VarRange> var_map;
    std::map<std::string, VarRange> row_map;

    Eigen::Index num_vars() const { return q.size(); }
    Eigen::Index num_constraints() const { return l.size(); }

    double objective(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(P.selfadjointView<Eigen::Upper>() * x) + q.dot(x);
    }

    const VarRange& range(const std::string& name) const {
        auto it = var_map.find(name);
        if (it == var_map.end()) {
            throw std::out_of_range("no variable block named '" + name + "'");
        }
        return it->second;
    }

    Eigen::VectorXd block(const Eigen::VectorXd& x, const std::string& name) const {
        const VarRange& r = range(name);
        return x.segment(static_cast<Eigen::Index>(r.offset),
                         static_cast<Eigen::Index>(r.size));
    }

    const VarRange& row_range(const std::string& name) const {
        auto it = row_map.find(name);
        if (it == row_map.end()) {
            throw std::out_of_range("no row group named '" + name + "'");
        }
        return it->second;
    }

    Eigen::VectorXd row_block(const Eigen::VectorXd& y, const std::string& name) const {
        const VarRange& r = row_range(name);
        return y.segment(static_cast<Eigen::Index>(r.offset),
                         static_cast<Eigen::Index>(r.size));
    }
};

} // namespace risksvm
