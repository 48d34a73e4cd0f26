#pragma once

#include "decaygraph/lattice.hpp"
#include "decaygraph/spectra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace decaygraph {

inline constexpr double kPurityTolerance = 1e-8;
inline constexpr double kChargeTolerance = 1e-9;
inline constexpr double kAmplitudeFloor = 1e-300;

// Lattices eligible for pure-decay and charge claims.
using ValidatedLattice = std::variant<Lattice1D, ProductLattice>;

// Ordered run of nodes along which the pure-decay profile is a single
// geometric sequence. Nodes are listed in the direction of the edges, so the
// fitted ratio is the downstream/upstream amplitude ratio.
//
//   ring:      one chain per segment, its sites plus the next segment's first
//              site (the segment owns those bonds)
//   circulant: the path 1 -> N, plus the closing bond 1 -> N
//   open:      the whole chain, N -> 1
struct Chain {
  int id = 0;
  ChainType type = ChainType::A;
  std::vector<int> nodes;
};

std::vector<Chain> chain_decomposition(const Lattice1D& lattice);

struct ChainFit {
  int chain_id = 0;
  ChainType type = ChainType::A;
  std::vector<int> nodes;
  double slope = 0.0;      // d ln|psi| per step along the chain
  double intercept = 0.0;  // ln|psi| at the chain's first node (fitted)
  double ratio = 1.0;      // exp(slope)
  double residual = 0.0;   // max |ln|psi| - fit|
};

struct DecayReport {
  std::vector<ChainFit> per_chain;
  // |log_t ratio_A| + |log_t ratio_B| when both chain types are present.
  std::optional<double> partition_sum;
  int localization_node = 0;
  double purity = 0.0;
  double cross_mode_deviation = 0.0;
  // Largest relative spread of ratios among chains of the same type.
  double same_type_spread = 0.0;
};

// Least-squares line through ln|psi| along the chain. Throws ChainTooShort
// for fewer than two points.
ChainFit fit_chain(const Chain& chain, const Eigen::VectorXd& log_abs);

DecayReport extract_decay_constants(const Eigen::VectorXcd& profile, const Lattice1D& lattice);

struct ProductDecayReport {
  std::vector<DecayReport> axes;  // slices through the localization node
  int localization_node = 0;
  // Largest deviation of ln|psi| from the sum of its axis slices.
  double separability = 0.0;
  double purity = 0.0;
};

ProductDecayReport extract_product_decay(const Eigen::VectorXcd& profile,
                                         const ProductLattice& product);

// max_j (max_n |psi_n(j)| - min_n |psi_n(j)|) over max-normalized modes; equal
// to the largest pairwise sup-distance between amplitude profiles.
double cross_mode_deviation(const Eigen::MatrixXcd& modes);

struct PureMode {
  cplx energy;
  Eigen::VectorXcd vector;
  double residual = 0.0;
};

// Residual-certified eigenvectors built from the pure-decay ansatz of each
// family (per-type decay constants for rings, Vandermonde columns for
// circulants, sine modes for open chains, tensor products for lattices).
std::vector<PureMode> analytic_pure_modes(const ValidatedLattice& lattice);

struct PureDecayOptions {
  double purity_tolerance = kPurityTolerance;
  double deviation_tolerance = kPurityTolerance;
  double degeneracy_tolerance = kDegeneracyTolerance;
};

struct PureDecayResult {
  double purity = 0.0;
  double cross_mode_deviation = 0.0;
  bool pass = false;
  // Modes inside degenerate subspaces that were replaced by certified
  // analytic vectors.
  int substituted_modes = 0;
};

PureDecayResult pure_decay_check(const EigenSystem& sys, const ValidatedLattice& lattice,
                                 const PureDecayOptions& options = {});

// Mode whose profile defines the charges: the least-damped mode unless it sits
// in a degenerate subspace, then the first non-degenerate mode. Returns -1 when
// every mode is degenerate.
int charge_profile_mode(const EigenSystem& sys,
                        double degeneracy_tolerance = kDegeneracyTolerance);

// Profile of charge_profile_mode, or the first analytic pure mode when every
// numerical mode is degenerate.
Eigen::VectorXcd representative_profile(const ValidatedLattice& lattice, const EigenSystem& sys);

// Q_a = sum over neighbours j of log_t(|psi_a| / |psi_j|), the base being the
// hopping ratio of the axis the edge belongs to.
std::vector<double> amplitude_charges(const Eigen::VectorXcd& profile,
                                      std::span<const DirectedEdge> edges,
                                      std::span<const double> axis_t);

// (outgoing - incoming) / 2 per node.
std::vector<double> combinatorial_charges(std::span<const DirectedEdge> edges, int dim);

// Charges of the smooth profile rebuilt from per-chain fits.
std::vector<double> fitted_charges(const DecayReport& report, std::span<const DirectedEdge> edges,
                                   double t, int dim);

struct ChargeMap {
  std::vector<double> amplitude;
  std::vector<double> combinatorial;
  double total = 0.0;
  bool quantized = false;
  double max_deviation = 0.0;   // || amplitude - combinatorial ||_inf
  int profile_mode = -1;        // -1 when an analytic profile was used
  double cross_check_deviation = 0.0;  // against a second mode's charges
};

ChargeMap compute_charges(const ValidatedLattice& lattice, const EigenSystem& sys,
                          const Hamiltonian& h);
ChargeMap compute_charges(const ValidatedLattice& lattice);

struct ChargeEquality {
  int sign = 1;
  double deviation = 0.0;
};

// Best sign s in {+1, -1} minimizing ||amplitude - s * combinatorial||_inf.
ChargeEquality fit_charge_sign(std::span<const double> amplitude,
                               std::span<const double> combinatorial);

// Throws ConventionMismatch when the best sign is -1.
ChargeEquality verify_charge_equality(const ValidatedLattice& lattice);

inline constexpr int kMaxSynthesisNodes = 16;

// Searches circulants, alternating rings and their products with
// target.size() nodes for a lattice whose combinatorial charges equal target
// node by node. Empty when no member of these families matches.
std::optional<ValidatedLattice> synthesize_charge_graph(std::span<const double> target,
                                                        HoppingRatio t,
                                                        double tolerance = kChargeTolerance);

}  // namespace decaygraph
