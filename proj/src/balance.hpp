#pragma once

#include <Eigen/Dense>

namespace decaygraph::detail {

// B = S^{-1} H S with S = diag(scale), chosen so that every node's off-diagonal
// row and column 2-norms agree (Osborne iteration). The balanced matrix of a
// pure-decay lattice is close to normal, so its eigenvectors keep full relative
// accuracy on exponentially small components once rescaled by S.
struct Balanced {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd scale;
};

Balanced balance(const Eigen::MatrixXcd& h, double tolerance = 1e-6, int max_sweeps = 5000);

}  // namespace decaygraph::detail
