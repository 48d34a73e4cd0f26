#include "decaygraph/decay.hpp"

#include "decaygraph/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace decaygraph {

namespace {

Eigen::VectorXd log_magnitudes(const Eigen::VectorXcd& profile) {
  const Eigen::VectorXd mag = profile.cwiseAbs();
  const double top = mag.maxCoeff();
  if (!(top > 0.0)) {
    throw Error(ErrorCode::UnderflowSites, "profile is identically zero");
  }
  for (Eigen::Index j = 0; j < mag.size(); ++j) {
    if (!(mag(j) >= kAmplitudeFloor * top) || mag(j) == 0.0) {
      throw Error(ErrorCode::UnderflowSites,
                  "site " + std::to_string(j + 1) +
                      " amplitude below representable floor; use a smaller t or lattice",
                  static_cast<long>(j));
    }
  }
  return mag.array().log().matrix();
}

double max_abs_log_ratio(const ChainFit& fit, double log_t) {
  return std::abs(fit.slope / log_t);
}

double charge_floor_check(const Eigen::VectorXcd& profile, int node) {
  const double mag = std::abs(profile(node));
  if (mag == 0.0 || !std::isfinite(mag)) {
    throw Error(ErrorCode::ZeroAmplitude,
                "site " + std::to_string(node + 1) + " has zero amplitude", node);
  }
  return mag;
}

Hamiltonian build_validated(const ValidatedLattice& lattice) {
  return std::visit([](const auto& l) { return build(LatticeSpec{l}); }, lattice);
}

std::vector<PureMode> ring_pure_modes(const SegmentedRing& ring, HoppingRatio t,
                                      const Eigen::MatrixXcd& h) {
  const int L = ring.size();
  const double tv = t.value();
  // Stated decay constants: t^(-sum M / L) per type-A bond and
  // t^(-sum N / L) per type-B bond, both measured along the edge direction.
  const double a_step = std::pow(tv, static_cast<double>(ring.total(ChainType::B)) / L);
  const double b_step = std::pow(tv, -static_cast<double>(ring.total(ChainType::A)) / L);
  constexpr double kPi = 3.14159265358979323846;

  std::vector<PureMode> modes;
  modes.reserve(L);
  for (int n = 0; n < L; ++n) {
    const cplx phase = std::polar(1.0, 2.0 * kPi * n / L);
    Eigen::VectorXcd v(L);
    v(0) = 1.0;
    for (int j = 0; j + 1 < L; ++j) {
      v(j + 1) = v(j) * phase * (ring.bond_type(j) == ChainType::A ? a_step : b_step);
    }
    Eigen::MatrixXcd column = v;
    normalize_columns(column);
    PureMode mode;
    mode.vector = column.col(0);
    const Eigen::VectorXcd hv = h * mode.vector;
    mode.energy = mode.vector.dot(hv) / mode.vector.squaredNorm();
    mode.residual = (hv - mode.energy * mode.vector).cwiseAbs().maxCoeff();
    modes.push_back(std::move(mode));
  }
  return modes;
}

std::vector<PureMode> from_system(const EigenSystem& sys) {
  std::vector<PureMode> modes;
  modes.reserve(sys.size());
  for (int n = 0; n < sys.size(); ++n) {
    modes.push_back({sys.values(n), sys.right.col(n), sys.residuals(n)});
  }
  return modes;
}

std::vector<PureMode> lattice_pure_modes(const Lattice1D& lattice) {
  const Hamiltonian h = build_lattice(lattice);
  struct {
    const Lattice1D& lattice;
    const Hamiltonian& h;
    std::vector<PureMode> operator()(const SegmentedRing& r) const {
      return ring_pure_modes(r, lattice.t, h.matrix);
    }
    std::vector<PureMode> operator()(const CirculantGraph& g) const {
      return from_system(circulant_analytic_spectrum(g, lattice.t));
    }
    std::vector<PureMode> operator()(const ObcChain& c) const {
      return from_system(obc_analytic_spectrum(c, lattice.t).system);
    }
  } visitor{lattice, h};
  return std::visit(visitor, lattice.geometry);
}

}  // namespace

ChainFit fit_chain(const Chain& chain, const Eigen::VectorXd& log_abs) {
  ChainFit fit;
  fit.chain_id = chain.id;
  fit.type = chain.type;
  fit.nodes = chain.nodes;
  const int k = static_cast<int>(chain.nodes.size());
  if (k < 2) {
    throw Error(ErrorCode::ChainTooShort, "chain " + std::to_string(chain.id + 1) +
                                              " has fewer than two points",
                chain.id);
  }
  // Ordinary least squares of ln|psi| against the step index.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int p = 0; p < k; ++p) {
    const double y = log_abs(chain.nodes[p]);
    sx += p;
    sy += y;
    sxx += static_cast<double>(p) * p;
    sxy += p * y;
  }
  const double denom = k * sxx - sx * sx;
  fit.slope = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  fit.ratio = std::exp(fit.slope);
  for (int p = 0; p < k; ++p) {
    const double model = fit.intercept + fit.slope * p;
    fit.residual = std::max(fit.residual, std::abs(log_abs(chain.nodes[p]) - model));
  }
  return fit;
}

std::vector<Chain> chain_decomposition(const Lattice1D& lattice) {
  std::vector<Chain> chains;
  if (const auto* ring = std::get_if<SegmentedRing>(&lattice.geometry)) {
    const int L = ring->size();
    for (std::size_t s = 0; s < ring->segments.size(); ++s) {
      const auto& seg = ring->segments[s];
      const int start = ring->segment_start(s);
      Chain chain{static_cast<int>(s), seg.type, {}};
      for (int p = 0; p <= seg.length; ++p) chain.nodes.push_back((start + p) % L);
      if (seg.type == ChainType::A) std::reverse(chain.nodes.begin(), chain.nodes.end());
      chains.push_back(std::move(chain));
    }
  } else if (const auto* graph = std::get_if<CirculantGraph>(&lattice.geometry)) {
    const int N = graph->n_nodes;
    Chain path{0, ChainType::A, {}};
    for (int a = 0; a < N; ++a) path.nodes.push_back(a);
    chains.push_back(std::move(path));
    chains.push_back(Chain{1, ChainType::B, {0, N - 1}});
  } else {
    const auto& obc = std::get<ObcChain>(lattice.geometry);
    Chain whole{0, ChainType::A, {}};
    for (int i = obc.n_sites - 1; i >= 0; --i) whole.nodes.push_back(i);
    chains.push_back(std::move(whole));
  }
  return chains;
}

DecayReport extract_decay_constants(const Eigen::VectorXcd& profile, const Lattice1D& lattice) {
  if (profile.size() != lattice.size()) {
    throw Error(ErrorCode::ValidationError, "profile length " + std::to_string(profile.size()) +
                                                " does not match lattice size " +
                                                std::to_string(lattice.size()));
  }
  const Eigen::VectorXd log_abs = log_magnitudes(profile);
  const double log_t = std::log(lattice.t.value());

  DecayReport report;
  log_abs.maxCoeff(&report.localization_node);
  for (const auto& chain : chain_decomposition(lattice)) {
    report.per_chain.push_back(fit_chain(chain, log_abs));
    report.purity = std::max(report.purity, report.per_chain.back().residual);
  }

  const ChainFit* first_a = nullptr;
  const ChainFit* first_b = nullptr;
  for (const auto& fit : report.per_chain) {
    const ChainFit*& ref = fit.type == ChainType::A ? first_a : first_b;
    if (!ref) {
      ref = &fit;
      continue;
    }
    report.same_type_spread =
        std::max(report.same_type_spread, std::abs(fit.ratio - ref->ratio) / ref->ratio);
  }
  if (first_a && first_b) {
    report.partition_sum = max_abs_log_ratio(*first_a, log_t) + max_abs_log_ratio(*first_b, log_t);
  }
  return report;
}

ProductDecayReport extract_product_decay(const Eigen::VectorXcd& profile,
                                         const ProductLattice& product) {
  if (static_cast<std::size_t>(profile.size()) != product.size()) {
    throw Error(ErrorCode::ValidationError, "profile length does not match lattice size");
  }
  const Eigen::VectorXd log_abs = log_magnitudes(profile);
  ProductDecayReport report;
  log_abs.maxCoeff(&report.localization_node);
  const std::vector<int> origin = product.coordinates(report.localization_node);

  std::vector<Eigen::VectorXd> slice_logs;
  for (std::size_t k = 0; k < product.axes.size(); ++k) {
    const int n = product.axes[k].size();
    Eigen::VectorXcd slice(n);
    std::vector<int> coords = origin;
    for (int c = 0; c < n; ++c) {
      coords[k] = c;
      slice(c) = profile(product.node(coords));
    }
    report.axes.push_back(extract_decay_constants(slice, product.axes[k]));
    report.purity = std::max(report.purity, report.axes.back().purity);
    slice_logs.push_back(slice.cwiseAbs().array().log().matrix());
  }

  const double peak = log_abs(report.localization_node);
  const double extra = static_cast<double>(product.axes.size()) - 1.0;
  for (Eigen::Index node = 0; node < log_abs.size(); ++node) {
    const std::vector<int> coords = product.coordinates(static_cast<int>(node));
    double model = -extra * peak;
    for (std::size_t k = 0; k < coords.size(); ++k) model += slice_logs[k](coords[k]);
    report.separability = std::max(report.separability, std::abs(log_abs(node) - model));
  }
  report.purity = std::max(report.purity, report.separability);
  return report;
}

double cross_mode_deviation(const Eigen::MatrixXcd& modes) {
  if (modes.cols() < 2) return 0.0;
  Eigen::MatrixXd mag = modes.cwiseAbs();
  for (Eigen::Index n = 0; n < mag.cols(); ++n) mag.col(n) /= mag.col(n).maxCoeff();
  return (mag.rowwise().maxCoeff() - mag.rowwise().minCoeff()).maxCoeff();
}

std::vector<PureMode> analytic_pure_modes(const ValidatedLattice& lattice) {
  if (const auto* single = std::get_if<Lattice1D>(&lattice)) {
    return lattice_pure_modes(*single);
  }
  const auto& product = std::get<ProductLattice>(lattice);
  std::vector<PureMode> acc = lattice_pure_modes(product.axes.front());
  for (std::size_t k = 1; k < product.axes.size(); ++k) {
    const std::vector<PureMode> axis = lattice_pure_modes(product.axes[k]);
    std::vector<PureMode> next;
    next.reserve(acc.size() * axis.size());
    for (const auto& a : acc) {
      for (const auto& b : axis) {
        next.push_back({a.energy + b.energy, Eigen::kroneckerProduct(a.vector, b.vector), 0.0});
      }
    }
    acc = std::move(next);
  }
  const Hamiltonian h = build_product_lattice(product);
  for (auto& mode : acc) {
    mode.residual = (h.matrix * mode.vector - mode.energy * mode.vector).cwiseAbs().maxCoeff();
  }
  return acc;
}

PureDecayResult pure_decay_check(const EigenSystem& sys, const ValidatedLattice& lattice,
                                 const PureDecayOptions& options) {
  PureDecayResult result;
  const double norm = std::max(sys.matrix_norm, std::numeric_limits<double>::min());
  Eigen::MatrixXcd modes = sys.right;

  bool unresolved = false;
  std::vector<PureMode> analytic;
  std::vector<char> used;
  for (const auto& group : degenerate_groups(sys.values, options.degeneracy_tolerance * norm)) {
    if (group.size() < 2) continue;
    if (analytic.empty()) {
      analytic = analytic_pure_modes(lattice);
      used.assign(analytic.size(), 0);
    }
    for (int n : group) {
      bool found = false;
      for (std::size_t a = 0; a < analytic.size(); ++a) {
        if (used[a]) continue;
        if (std::abs(analytic[a].energy - sys.values(n)) >= options.degeneracy_tolerance * norm)
          continue;
        if (analytic[a].residual > kResidualTolerance * norm) continue;
        used[a] = 1;
        modes.col(n) = analytic[a].vector;
        ++result.substituted_modes;
        found = true;
        break;
      }
      unresolved = unresolved || !found;
    }
  }

  for (Eigen::Index n = 0; n < modes.cols(); ++n) {
    try {
      if (const auto* single = std::get_if<Lattice1D>(&lattice)) {
        result.purity = std::max(result.purity, extract_decay_constants(modes.col(n), *single).purity);
      } else {
        result.purity = std::max(
            result.purity,
            extract_product_decay(modes.col(n), std::get<ProductLattice>(lattice)).purity);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnderflowSites) throw;
      result.purity = std::numeric_limits<double>::infinity();
    }
  }
  result.cross_mode_deviation = cross_mode_deviation(modes);
  result.pass = !unresolved && result.purity <= options.purity_tolerance &&
                result.cross_mode_deviation <= options.deviation_tolerance;
  return result;
}

int charge_profile_mode(const EigenSystem& sys, double degeneracy_tolerance) {
  const double tol = degeneracy_tolerance * std::max(sys.matrix_norm, 1e-300);
  std::vector<char> degenerate(sys.size(), 0);
  for (const auto& group : degenerate_groups(sys.values, tol)) {
    if (group.size() > 1) {
      for (int n : group) degenerate[n] = 1;
    }
  }
  const int preferred = least_damped_mode(sys);
  if (!degenerate[preferred]) return preferred;
  for (int n = 0; n < sys.size(); ++n) {
    if (!degenerate[n]) return n;
  }
  return -1;
}

std::vector<double> amplitude_charges(const Eigen::VectorXcd& profile,
                                      std::span<const DirectedEdge> edges,
                                      std::span<const double> axis_t) {
  std::vector<double> charges(profile.size(), 0.0);
  for (const auto& e : edges) {
    if (e.axis < 0 || static_cast<std::size_t>(e.axis) >= axis_t.size()) {
      throw Error(ErrorCode::ValidationError, "edge axis tag has no hopping ratio", e.axis);
    }
    const double log_t = std::log(axis_t[e.axis]);
    const double tail = charge_floor_check(profile, e.tail);
    const double head = charge_floor_check(profile, e.head);
    const double q = std::log(tail / head) / log_t;
    charges[e.tail] += q;
    charges[e.head] -= q;
  }
  return charges;
}

std::vector<double> combinatorial_charges(std::span<const DirectedEdge> edges, int dim) {
  std::vector<double> charges(dim, 0.0);
  for (const auto& e : edges) {
    charges[e.tail] += 0.5;
    charges[e.head] -= 0.5;
  }
  return charges;
}

std::vector<double> fitted_charges(const DecayReport& report, std::span<const DirectedEdge> edges,
                                   double t, int dim) {
  std::vector<double> sum(dim, 0.0);
  std::vector<int> count(dim, 0);
  for (const auto& fit : report.per_chain) {
    for (std::size_t p = 0; p < fit.nodes.size(); ++p) {
      sum[fit.nodes[p]] += fit.intercept + fit.slope * static_cast<double>(p);
      ++count[fit.nodes[p]];
    }
  }
  std::vector<double> model(dim);
  for (int j = 0; j < dim; ++j) {
    if (count[j] == 0) {
      throw Error(ErrorCode::ValidationError, "node " + std::to_string(j + 1) + " is in no chain",
                  j);
    }
    model[j] = sum[j] / count[j];
  }
  const double log_t = std::log(t);
  std::vector<double> charges(dim, 0.0);
  for (const auto& e : edges) {
    const double q = (model[e.tail] - model[e.head]) / log_t;
    charges[e.tail] += q;
    charges[e.head] -= q;
  }
  return charges;
}

Eigen::VectorXcd representative_profile(const ValidatedLattice& lattice, const EigenSystem& sys) {
  const int mode = charge_profile_mode(sys);
  if (mode >= 0) return sys.right.col(mode);
  return analytic_pure_modes(lattice).front().vector;
}

ChargeMap compute_charges(const ValidatedLattice& lattice, const EigenSystem& sys,
                          const Hamiltonian& h) {
  ChargeMap map;
  map.profile_mode = charge_profile_mode(sys);
  const Eigen::VectorXcd profile = representative_profile(lattice, sys);
  map.amplitude = amplitude_charges(profile, h.edges, h.axis_t);
  map.combinatorial = combinatorial_charges(h.edges, h.dim());

  map.total = std::accumulate(map.amplitude.begin(), map.amplitude.end(), 0.0);
  map.quantized = std::all_of(map.amplitude.begin(), map.amplitude.end(), [](double q) {
    return std::abs(2.0 * q - std::round(2.0 * q)) <= kChargeTolerance;
  });
  for (std::size_t j = 0; j < map.amplitude.size(); ++j) {
    map.max_deviation = std::max(map.max_deviation, std::abs(map.amplitude[j] - map.combinatorial[j]));
  }

  // A second non-degenerate mode must give the same charges.
  const double tol = kDegeneracyTolerance * std::max(sys.matrix_norm, 1e-300);
  for (const auto& group : degenerate_groups(sys.values, tol)) {
    if (group.size() != 1 || group.front() == map.profile_mode) continue;
    const auto other = amplitude_charges(sys.right.col(group.front()), h.edges, h.axis_t);
    for (std::size_t j = 0; j < other.size(); ++j) {
      map.cross_check_deviation =
          std::max(map.cross_check_deviation, std::abs(other[j] - map.amplitude[j]));
    }
    break;
  }
  return map;
}

ChargeMap compute_charges(const ValidatedLattice& lattice) {
  const Hamiltonian h = build_validated(lattice);
  const EigenSystem sys = eigendecompose(h.matrix);
  return compute_charges(lattice, sys, h);
}

ChargeEquality fit_charge_sign(std::span<const double> amplitude,
                               std::span<const double> combinatorial) {
  if (amplitude.size() != combinatorial.size()) {
    throw Error(ErrorCode::ValidationError, "charge vectors differ in length");
  }
  double plus = 0.0, minus = 0.0;
  for (std::size_t j = 0; j < amplitude.size(); ++j) {
    plus = std::max(plus, std::abs(amplitude[j] - combinatorial[j]));
    minus = std::max(minus, std::abs(amplitude[j] + combinatorial[j]));
  }
  return minus < plus ? ChargeEquality{-1, minus} : ChargeEquality{+1, plus};
}

ChargeEquality verify_charge_equality(const ValidatedLattice& lattice) {
  const ChargeMap map = compute_charges(lattice);
  const ChargeEquality eq = fit_charge_sign(map.amplitude, map.combinatorial);
  if (eq.sign != 1) {
    throw Error(ErrorCode::ConventionMismatch,
                "amplitude charges match the combinatorial charges only after a sign flip");
  }
  return eq;
}

namespace {

std::vector<Lattice1D> one_dimensional_candidates(int n, HoppingRatio t) {
  std::vector<Lattice1D> out;
  // Circulants: choose a_q for q <= n/2, mirror the rest.
  const int half = n / 2;
  for (unsigned mask = 1; mask < (1u << half); ++mask) {
    std::vector<int> a(n - 1, 0);
    for (int q = 1; q <= half; ++q) {
      if (mask & (1u << (q - 1))) a[q - 1] = a[n - q - 1] = 1;
    }
    out.push_back({validate_circulant(n, a), t});
  }
  // Rings: every composition of n into segments, starting with either type.
  if (n >= 3) {
    for (unsigned cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
      std::vector<int> lengths{1};
      for (int i = 1; i < n; ++i) {
        if (cuts & (1u << (i - 1))) {
          lengths.push_back(1);
        } else {
          ++lengths.back();
        }
      }
      if (lengths.size() > 1 && lengths.size() % 2 != 0) continue;
      for (ChainType first : {ChainType::A, ChainType::B}) {
        std::vector<Segment> segments;
        ChainType type = first;
        for (int len : lengths) {
          segments.push_back({type, len});
          type = opposite(type);
        }
        out.push_back({validate_ring(std::move(segments)), t});
      }
    }
  }
  return out;
}

// Ordered factorizations of n into factors >= 2 with at least two factors.
void factorizations(int n, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  for (int d = 2; d <= n; ++d) {
    if (n % d != 0) continue;
    prefix.push_back(d);
    if (d == n) {
      if (prefix.size() >= 2) out.push_back(prefix);
    } else {
      factorizations(n / d, prefix, out);
    }
    prefix.pop_back();
  }
}

bool charges_match(const Hamiltonian& h, std::span<const double> target, double tolerance) {
  const auto q = combinatorial_charges(h.edges, h.dim());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (std::abs(q[j] - target[j]) > tolerance) return false;
  }
  return true;
}

}  // namespace

std::optional<ValidatedLattice> synthesize_charge_graph(std::span<const double> target,
                                                        HoppingRatio t, double tolerance) {
  const int n = static_cast<int>(target.size());
  if (n < 2 || n > kMaxSynthesisNodes) {
    throw Error(ErrorCode::ValidationError,
                "charge synthesis needs 2.." + std::to_string(kMaxSynthesisNodes) + " nodes");
  }
  for (const auto& lattice : one_dimensional_candidates(n, t)) {
    if (charges_match(build_lattice(lattice), target, tolerance)) return lattice;
  }
  std::vector<int> prefix;
  std::vector<std::vector<int>> shapes;
  factorizations(n, prefix, shapes);
  for (const auto& shape : shapes) {
    std::vector<std::vector<Lattice1D>> per_axis;
    for (int size : shape) per_axis.push_back(one_dimensional_candidates(size, t));
    std::vector<std::size_t> pick(shape.size(), 0);
    while (true) {
      std::vector<Lattice1D> axes;
      for (std::size_t k = 0; k < shape.size(); ++k) axes.push_back(per_axis[k][pick[k]]);
      ProductLattice product = validate_product(std::move(axes));
      if (charges_match(build_product_lattice(product), target, tolerance)) return product;
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == per_axis[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }
  return std::nullopt;
}

}  // namespace decaygraph
