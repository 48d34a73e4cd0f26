#pragma once

#include "decaygraph/decay.hpp"
#include "decaygraph/spectra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace decaygraph {

inline constexpr double kBackwardErrorTolerance = 1e-12;

// Single-site drive of the lossy lattice ((omega + i gamma) I - H) x = s e_src.
struct DriveConfig {
  int source_node = 0;  // 0-based
  double gamma = 0.0;
  std::vector<double> omega_grid;
  double amplitude = 1.0;
};

// Throws InvalidDrive unless gamma exceeds every Im(E_n), the grid is
// non-empty and strictly increasing, and the source is a valid node.
void validate_drive(const DriveConfig& cfg, const EigenSystem& sys);

// gamma = max Im(E) + 0.05 ||H||_inf, 401 points over [min Re E - 1, max Re E + 1].
DriveConfig default_drive(const EigenSystem& sys, int source_node = 0);

std::vector<double> linear_grid(double lo, double hi, int steps);

struct ResponseProfile {
  double omega = 0.0;
  Eigen::VectorXcd x;
  double solve_residual = 0.0;
};

// Throws SingularSystem when omega + i gamma is numerically an eigenvalue or
// the normwise backward error exceeds kBackwardErrorTolerance.
ResponseProfile steady_state(const Eigen::MatrixXcd& h, const DriveConfig& cfg, double omega);

// One profile per grid frequency, in grid order.
std::vector<ResponseProfile> frequency_sweep(const Eigen::MatrixXcd& h, const DriveConfig& cfg);

// Grid frequency where ||x||_inf peaks.
double omega_at_peak(const std::vector<ResponseProfile>& sweep);

struct ModeSelection {
  int selected_mode = 0;       // overlap-maximizing mode
  int least_damped_mode = 0;
  double overlap = 0.0;        // |<v_sel, x>| of unit vectors
  bool matches_least_damped = false;
};

ModeSelection mode_selection_check(const ResponseProfile& profile, const EigenSystem& sys);

struct LogProfile {
  Eigen::VectorXd log_abs;
  std::vector<ChainFit> fits;
  double slope = 0.0;     // first chain
  double residual = 0.0;  // max over chains
  bool monotone = false;  // |x| monotone along every chain
};

// Log magnitudes with per-chain linear fits (same chains as the decay
// analysis). Without a lattice the whole node order is one chain.
LogProfile log_profile(const ResponseProfile& profile, const Lattice1D& lattice);
LogProfile log_profile(const ResponseProfile& profile);

}  // namespace decaygraph
