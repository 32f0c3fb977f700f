#pragma once

#include <Eigen/Dense>

#include <map>
#include <vector>

#include "tlppo/grid.hpp"

namespace tlppo::oracle {

struct DenseEigen {
    std::map<HexCoord, double> vector;
    double value = 0.0;
};

/// Principal eigenpair of the free-cell adjacency matrix, built from
/// coordinates alone and sign-fixed to be nonnegative.
inline DenseEigen dense_principal(const HexGrid& g) {
    std::vector<HexCoord> free;
    for (CellId c : g.free_cells()) free.push_back(g.coord(c));
    const auto n = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (hex_distance(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]) == 1) A(i, j) = 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd v = es.eigenvectors().col(n - 1);
    if (v.sum() < 0) v = -v;
    DenseEigen out;
    out.value = es.eigenvalues()(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) out.vector[free[static_cast<std::size_t>(i)]] = v(i);
    return out;
}

}  // namespace tlppo::oracle
