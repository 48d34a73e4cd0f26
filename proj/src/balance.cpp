#include "balance.hpp"

#include <cmath>

namespace decaygraph::detail {

Balanced balance(const Eigen::MatrixXcd& h, double tolerance, int max_sweeps) {
  const Eigen::Index n = h.rows();
  Balanced out{h, Eigen::VectorXd::Ones(n)};
  Eigen::MatrixXcd& b = out.matrix;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = std::sqrt(b.col(i).squaredNorm() - std::norm(b(i, i)));
      const double row = std::sqrt(b.row(i).squaredNorm() - std::norm(b(i, i)));
      if (col == 0.0 || row == 0.0) continue;
      const double f = std::sqrt(row / col);
      if (std::abs(f - 1.0) > tolerance) converged = false;
      b.col(i) *= f;
      b.row(i) /= f;
      out.scale(i) *= f;
    }
    if (converged) break;
  }
  // Keep the largest scale at 1 so S stays representable.
  const double top = out.scale.maxCoeff();
  out.scale /= top;
  return out;
}

}  // namespace decaygraph::detail
