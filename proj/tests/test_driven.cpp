#include "decaygraph/driven.hpp"
#include "decaygraph/errors.hpp"
#include "decaygraph/lattice.hpp"
#include "decaygraph/spectra.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace decaygraph;

namespace {

constexpr ChainType A = ChainType::A;
constexpr ChainType B = ChainType::B;

Lattice1D ring(std::vector<Segment> segments, double t) {
  return {validate_ring(std::move(segments)), HoppingRatio(t)};
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ValidationError;
}

// Sum_n v_n (w_n . e_s) / (z - E_n) from a plain, unbalanced eigensolver.
Eigen::VectorXcd expansion_oracle(const Eigen::MatrixXcd& h, int source, cplx z) {
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::MatrixXcd w = v.inverse();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(h.rows());
  for (Eigen::Index n = 0; n < h.rows(); ++n) {
    x += v.col(n) * (w(n, source) / (z - es.eigenvalues()(n)));
  }
  return x;
}

DriveConfig drive_at(int source, double gamma, double omega) {
  return DriveConfig{source, gamma, {omega}, 1.0};
}

}  // namespace

TEST(Drive, Validation) {
  const auto h = build_lattice(ring({{A, 11}, {B, 1}}, 1.5)).matrix;
  const EigenSystem sys = eigendecompose(h);
  const double top = sys.values.imag().maxCoeff();
  EXPECT_EQ(code_of([&] { validate_drive(drive_at(0, top, 0.0), sys); }), ErrorCode::InvalidDrive);
  EXPECT_EQ(code_of([&] { validate_drive(drive_at(12, top + 1, 0.0), sys); }), ErrorCode::InvalidDrive);
  EXPECT_EQ(code_of([&] { validate_drive(drive_at(-1, top + 1, 0.0), sys); }), ErrorCode::InvalidDrive);
  EXPECT_EQ(code_of([&] { validate_drive(DriveConfig{0, top + 1, {}, 1.0}, sys); }),
            ErrorCode::InvalidDrive);
  EXPECT_EQ(code_of([&] { validate_drive(DriveConfig{0, top + 1, {1.0, 1.0}, 1.0}, sys); }),
            ErrorCode::InvalidDrive);
  EXPECT_EQ(code_of([&] { validate_drive(DriveConfig{0, top + 1, {0.0}, 0.0}, sys); }),
            ErrorCode::InvalidDrive);
  EXPECT_NO_THROW(validate_drive(default_drive(sys), sys));
}

TEST(Drive, DefaultsAndGrid) {
  const EigenSystem sys = eigendecompose(build_lattice(ring({{A, 5}, {B, 3}}, 2.0)).matrix);
  const DriveConfig cfg = default_drive(sys, 2);
  EXPECT_EQ(cfg.source_node, 2);
  EXPECT_GT(cfg.gamma, sys.values.imag().maxCoeff());
  EXPECT_EQ(cfg.omega_grid.size(), 401u);
  EXPECT_EQ(linear_grid(0.0, 1.0, 5), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(linear_grid(3.0, 4.0, 1), (std::vector<double>{3.0}));
  EXPECT_EQ(code_of([] { linear_grid(0.0, 1.0, 0); }), ErrorCode::InvalidDrive);
}

TEST(Drive, ResolventIdentity) {
  for (const auto& l : {ring({{A, 11}, {B, 1}}, 1.5), ring({{A, 4}, {B, 3}, {A, 2}, {B, 5}}, 2.0),
                        Lattice1D{validate_circulant(4, {1, 1, 1}), HoppingRatio(3.0)}}) {
    const auto h = build_lattice(l).matrix;
    const double gamma = eigendecompose(h).values.imag().maxCoeff() + 0.3;
    for (int source : {0, 2}) {
      for (double omega : {-1.0, 0.2, 1.7}) {
        const ResponseProfile x = steady_state(h, drive_at(source, gamma, omega), omega);
        const Eigen::VectorXcd y = expansion_oracle(h, source, cplx(omega, gamma));
        EXPECT_LT((x.x - y).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE(x.solve_residual, 1e-12);
      }
    }
  }
}

TEST(Drive, LinearInAmplitude) {
  const auto h = build_lattice(ring({{A, 7}, {B, 2}}, 1.5)).matrix;
  DriveConfig one = drive_at(3, 2.0, 0.4);
  DriveConfig two = one;
  two.amplitude = 2.0;
  const auto x1 = steady_state(h, one, 0.4).x;
  const auto x2 = steady_state(h, two, 0.4).x;
  EXPECT_LT((x2 - 2.0 * x1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Drive, ReciprocityBrokenButTransposeSymmetric) {
  const auto h = build_lattice(ring({{A, 6}, {B, 3}}, 2.0)).matrix;
  const Eigen::MatrixXcd ht = h.transpose();
  const double gamma = 3.0, omega = 0.5;
  const auto from0 = steady_state(h, drive_at(0, gamma, omega), omega).x;
  const auto from4 = steady_state(h, drive_at(4, gamma, omega), omega).x;
  EXPECT_GT(std::abs(from0(4) - from4(0)), 1e-3);
  const auto t_from4 = steady_state(ht, drive_at(4, gamma, omega), omega).x;
  EXPECT_LT(std::abs(from0(4) - t_from4(0)), 1e-12);
}

TEST(Drive, SingularAtEigenvalue) {
  const auto h = build_lattice({validate_obc_chain(2), HoppingRatio(4.0)}).matrix;
  EXPECT_EQ(code_of([&] { steady_state(h, drive_at(0, 0.0, 2.0), 2.0); }), ErrorCode::SingularSystem);
}

TEST(Selection, OverlapGrowsAsLossApproachesLeastDamped) {
  const Lattice1D l = ring({{A, 11}, {B, 1}}, 1.5);
  const auto h = build_lattice(l).matrix;
  const EigenSystem sys = eigendecompose(h);
  const int sel = least_damped_mode(sys);
  const double g0 = sys.values.imag().maxCoeff() + 0.01;
  double last = 0.0;
  for (double f : {2.0, 1.5, 1.1, 1.0}) {
    const auto x = steady_state(h, drive_at(0, f * g0, sys.values(sel).real()), sys.values(sel).real());
    const ModeSelection m = mode_selection_check(x, sys);
    EXPECT_GT(m.overlap, last);
    EXPECT_TRUE(m.matches_least_damped);
    last = m.overlap;
  }
}

TEST(Selection, SameModeFromEverySource) {
  const Lattice1D l = ring({{A, 5}, {B, 4}}, 2.0);
  const auto h = build_lattice(l).matrix;
  const EigenSystem sys = eigendecompose(h);
  const int sel = least_damped_mode(sys);
  const double gamma = sys.values.imag().maxCoeff() + 1e-3;
  for (int source = 0; source < 9; ++source) {
    const auto x = steady_state(h, drive_at(source, gamma, sys.values(sel).real()), sys.values(sel).real());
    const ModeSelection m = mode_selection_check(x, sys);
    EXPECT_EQ(m.selected_mode, sel);
    EXPECT_GT(m.overlap, 0.99);
  }
}

TEST(Selection, PeakNearSelectedFrequency) {
  const auto h = build_lattice(ring({{A, 5}, {B, 4}}, 2.0)).matrix;
  const EigenSystem sys = eigendecompose(h);
  const int sel = least_damped_mode(sys);
  const double re = sys.values(sel).real();
  DriveConfig cfg{0, sys.values.imag().maxCoeff() + 1e-3, linear_grid(re - 0.5, re + 0.5, 101), 1.0};
  validate_drive(cfg, sys);
  const auto sweep = frequency_sweep(h, cfg);
  EXPECT_EQ(sweep.size(), 101u);
  EXPECT_NEAR(omega_at_peak(sweep), re, 0.01);
  EXPECT_EQ(code_of([] { omega_at_peak({}); }), ErrorCode::InvalidDrive);
}

TEST(LogProfile, NearResonancePureAndOpenChainNot) {
  const Lattice1D l = ring({{A, 11}, {B, 1}}, 1.5);
  const auto h = build_lattice(l).matrix;
  const EigenSystem sys = eigendecompose(h);
  const int sel = least_damped_mode(sys);
  const double gamma = sys.values.imag().maxCoeff() + 1e-9;
  const auto x = steady_state(h, drive_at(0, gamma, sys.values(sel).real()), sys.values(sel).real());
  EXPECT_LT(log_profile(x, l).residual, 1e-6);

  const Lattice1D obc{validate_obc_chain(12), HoppingRatio(1.5)};
  const auto ho = build_lattice(obc).matrix;
  const EigenSystem so = eigendecompose(ho);
  const double go = so.values.imag().maxCoeff() + 0.05 * so.matrix_norm;
  for (int source : {0, 3, 5}) {
    const auto xo = steady_state(ho, drive_at(source, go, so.values(0).real()), so.values(0).real());
    EXPECT_GT(log_profile(xo, obc).residual, 1e-3);
  }
}

TEST(LogProfile, UniformRingIsFlat) {
  const Lattice1D l = ring({{A, 10}}, 2.0);
  const auto h = build_lattice(l).matrix;
  const EigenSystem sys = eigendecompose(h);
  const int sel = least_damped_mode(sys);
  const double gamma = sys.values.imag().maxCoeff() + 1e-6;
  const auto x = steady_state(h, drive_at(0, gamma, sys.values(sel).real()), sys.values(sel).real());
  EXPECT_LT(std::abs(log_profile(x, l).slope), 1e-5);
}

TEST(LogProfile, ZeroAmplitude) {
  ResponseProfile p{0.0, Eigen::VectorXcd::Ones(4), 0.0};
  p.x(2) = 0.0;
  EXPECT_EQ(code_of([&] { log_profile(p); }), ErrorCode::ZeroAmplitude);
  p.x(2) = 1.0;
  const LogProfile lp = log_profile(p);
  EXPECT_TRUE(lp.monotone);
  EXPECT_NEAR(lp.residual, 0.0, 1e-15);
}
