#pragma once

#include "decaygraph/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace decaygraph {

using cplx = std::complex<double>;

inline constexpr double kResidualTolerance = 1e-9;     // relative to ||H||_inf
inline constexpr double kDegeneracyTolerance = 1e-7;   // relative to ||H||_inf
inline constexpr double kIllConditionedThreshold = 1e12;

double infinity_norm(const Eigen::MatrixXcd& m);

struct EigenSystem {
  Eigen::VectorXcd values;
  // Columns v_n; the largest-magnitude component of each is exactly 1.
  Eigen::MatrixXcd right;
  // Rows w_n with w_n . v_m = delta_nm.
  std::optional<Eigen::MatrixXcd> left;
  // ||H v_n - E_n v_n||_inf
  Eigen::VectorXd residuals;
  double matrix_norm = 0.0;
  double condition_estimate = 1.0;
  bool ill_conditioned = false;

  int size() const noexcept { return static_cast<int>(values.size()); }
  double max_residual() const noexcept;
};

struct EigenOptions {
  double residual_tolerance = kResidualTolerance;
  bool compute_left = true;
  bool balance = true;
};

// Dense eigendecomposition with diagonal pre-balancing, residual certificate
// and deterministic (Re, Im) ordering.
EigenSystem eigendecompose(const Eigen::MatrixXcd& h, const EigenOptions& options = {});

// Scales every column so its largest-magnitude entry is real and equal to 1.
void normalize_columns(Eigen::MatrixXcd& vectors);

// Recomputes residuals against h; throws CertificationFailure when any exceeds
// tolerance * ||h||_inf.
void certify(EigenSystem& sys, const Eigen::MatrixXcd& h,
             double tolerance = kResidualTolerance);

// Sorts modes by real part, then imaginary part; real parts closer than
// tolerance count as equal. Left vectors, residuals follow the permutation.
void sort_modes(EigenSystem& sys, double tolerance = 1e-9);

// Groups mode indices whose eigenvalues lie within tolerance of each other
// (transitively). Singleton groups are included.
std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXcd& values,
                                                double tolerance);

// Optimal (min-sum) assignment between two eigenvalue multisets; returns the
// largest pairwise distance of that assignment.
double matched_max_deviation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Mode obtained from the single-wave-vector ansatz on a two-chain ring.
struct RingModeSolution {
  int mode_index = 0;
  double phase = 0.0;  // k = 2 pi n / L
  cplx alpha;          // type-A chain root, |alpha| = t^(M/L)
  cplx energy;         // t / alpha + alpha
  Eigen::VectorXcd profile;
  double residual = 0.0;
};

// Analytic spectrum of a ring made of one type-A chain (N sites) and one
// type-B chain (M sites). The decay direction of each profile is chosen by
// residual against the built matrix, not assumed.
std::vector<RingModeSolution> ring_analytic_spectrum(const SegmentedRing& ring, HoppingRatio t);

// Vandermonde eigenbasis psi_mn = r^(m-1) e^{i(n-1)(m-1)theta}, r = t^(-1/N).
EigenSystem circulant_analytic_spectrum(const CirculantGraph& graph, HoppingRatio t);

struct ObcSpectrum {
  EigenSystem system;
  // Sign s of the profile psi_m = (t^(s/2))^m sin(m theta_n) that certified.
  int exponent_sign = 0;
};

ObcSpectrum obc_analytic_spectrum(const ObcChain& chain, HoppingRatio t);

struct ProductSpectrum {
  EigenSystem system;
  bool degenerate_ambiguity = false;
};

// Eigenpairs of a Kronecker sum from certified per-axis systems. Residuals are
// the sum of per-axis residuals; call certify() against the assembled matrix
// for the direct check.
ProductSpectrum kron_sum_spectrum(std::span<const EigenSystem> axis_systems);

// Index of the mode with the largest imaginary part. Ties (within tolerance)
// go to the smallest |Re E|, then to the lowest index.
int least_damped_mode(const EigenSystem& sys, double tolerance = 1e-9);

}  // namespace decaygraph
