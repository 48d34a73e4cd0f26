#include "decaygraph/driven.hpp"

#include "decaygraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace decaygraph {

namespace {

LogProfile fit_chains(const ResponseProfile& profile, const std::vector<Chain>& chains) {
  LogProfile out;
  const Eigen::VectorXd mag = profile.x.cwiseAbs();
  for (Eigen::Index j = 0; j < mag.size(); ++j) {
    if (!(mag(j) > 0.0) || !std::isfinite(mag(j))) {
      throw Error(ErrorCode::ZeroAmplitude,
                  "response vanishes at node " + std::to_string(j + 1), static_cast<long>(j));
    }
  }
  out.log_abs = mag.array().log().matrix();
  out.monotone = true;
  for (const auto& chain : chains) {
    ChainFit fit = fit_chain(chain, out.log_abs);
    int direction = 0;
    for (std::size_t p = 1; p < chain.nodes.size(); ++p) {
      const double step = out.log_abs(chain.nodes[p]) - out.log_abs(chain.nodes[p - 1]);
      const int sign = step > 0 ? 1 : (step < 0 ? -1 : 0);
      if (sign != 0 && direction != 0 && sign != direction) out.monotone = false;
      if (sign != 0) direction = sign;
    }
    out.residual = std::max(out.residual, fit.residual);
    out.fits.push_back(std::move(fit));
  }
  if (!out.fits.empty()) out.slope = out.fits.front().slope;
  return out;
}

}  // namespace

void validate_drive(const DriveConfig& cfg, const EigenSystem& sys) {
  if (cfg.source_node < 0 || cfg.source_node >= sys.right.rows()) {
    throw Error(ErrorCode::InvalidDrive,
                "source node " + std::to_string(cfg.source_node + 1) + " out of range",
                cfg.source_node);
  }
  if (!(cfg.amplitude > 0.0)) {
    throw Error(ErrorCode::InvalidDrive, "drive amplitude must be positive");
  }
  const double top = sys.values.imag().maxCoeff();
  if (!(cfg.gamma > top)) {
    throw Error(ErrorCode::InvalidDrive, "gamma = " + show(cfg.gamma) +
                                             " does not exceed max Im(E) = " +
                                             show(top));
  }
  if (cfg.omega_grid.empty()) {
    throw Error(ErrorCode::InvalidDrive, "frequency grid is empty");
  }
  for (std::size_t i = 1; i < cfg.omega_grid.size(); ++i) {
    if (!(cfg.omega_grid[i] > cfg.omega_grid[i - 1])) {
      throw Error(ErrorCode::InvalidDrive, "frequency grid is not strictly increasing",
                  static_cast<long>(i));
    }
  }
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidDrive, "grid needs at least one point");
  if (steps == 1) return {lo};
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) grid[i] = lo + (hi - lo) * i / (steps - 1);
  return grid;
}

DriveConfig default_drive(const EigenSystem& sys, int source_node) {
  DriveConfig cfg;
  cfg.source_node = source_node;
  cfg.gamma = sys.values.imag().maxCoeff() + 0.05 * sys.matrix_norm;
  cfg.omega_grid =
      linear_grid(sys.values.real().minCoeff() - 1.0, sys.values.real().maxCoeff() + 1.0, 401);
  return cfg;
}

ResponseProfile steady_state(const Eigen::MatrixXcd& h, const DriveConfig& cfg, double omega) {
  const Eigen::Index n = h.rows();
  if (cfg.source_node < 0 || cfg.source_node >= n) {
    throw Error(ErrorCode::InvalidDrive, "source node out of range", cfg.source_node);
  }
  const cplx z(omega, cfg.gamma);
  Eigen::MatrixXcd shifted = -h;
  shifted.diagonal().array() += z;

  Eigen::VectorXcd drive = Eigen::VectorXcd::Zero(n);
  drive(cfg.source_node) = cfg.amplitude;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::SingularSystem,
                "omega + i gamma is numerically an eigenvalue at omega = " + show(omega));
  }
  ResponseProfile out;
  out.omega = omega;
  out.x = lu.solve(drive);
  // One refinement step keeps the residual at working precision.
  out.x += lu.solve(drive - shifted * out.x);
  out.solve_residual = (shifted * out.x - drive).cwiseAbs().maxCoeff();
  const double scale =
      infinity_norm(shifted) * out.x.cwiseAbs().maxCoeff() + std::abs(cfg.amplitude);
  if (!(out.solve_residual <= kBackwardErrorTolerance * scale)) {
    throw Error(ErrorCode::SingularSystem,
                "steady-state backward error " + show(out.solve_residual / scale) +
                    " at omega = " + show(omega));
  }
  return out;
}

std::vector<ResponseProfile> frequency_sweep(const Eigen::MatrixXcd& h, const DriveConfig& cfg) {
  if (cfg.omega_grid.empty()) {
    throw Error(ErrorCode::InvalidDrive, "frequency grid is empty");
  }
  std::vector<ResponseProfile> out;
  out.reserve(cfg.omega_grid.size());
  for (double omega : cfg.omega_grid) out.push_back(steady_state(h, cfg, omega));
  return out;
}

double omega_at_peak(const std::vector<ResponseProfile>& sweep) {
  if (sweep.empty()) throw Error(ErrorCode::InvalidDrive, "empty sweep");
  const auto best = std::max_element(sweep.begin(), sweep.end(), [](const auto& a, const auto& b) {
    return a.x.cwiseAbs().maxCoeff() < b.x.cwiseAbs().maxCoeff();
  });
  return best->omega;
}

ModeSelection mode_selection_check(const ResponseProfile& profile, const EigenSystem& sys) {
  ModeSelection out;
  out.least_damped_mode = least_damped_mode(sys);
  const Eigen::VectorXcd x = profile.x.normalized();
  double best = -1.0;
  for (int n = 0; n < sys.size(); ++n) {
    const double overlap = std::abs(sys.right.col(n).normalized().dot(x));
    if (overlap > best) {
      best = overlap;
      out.selected_mode = n;
    }
  }
  out.overlap = std::min(1.0, best);
  out.matches_least_damped = out.selected_mode == out.least_damped_mode;
  return out;
}

LogProfile log_profile(const ResponseProfile& profile, const Lattice1D& lattice) {
  if (profile.x.size() != lattice.size()) {
    throw Error(ErrorCode::ValidationError, "response length does not match lattice size");
  }
  return fit_chains(profile, chain_decomposition(lattice));
}

LogProfile log_profile(const ResponseProfile& profile) {
  Chain whole{0, ChainType::A, {}};
  for (Eigen::Index j = 0; j < profile.x.size(); ++j) whole.nodes.push_back(static_cast<int>(j));
  return fit_chains(profile, {whole});
}

}  // namespace decaygraph
