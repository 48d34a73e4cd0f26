#include "decaygraph/spectra.hpp"

#include "balance.hpp"
#include "decaygraph/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace decaygraph {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd residuals_of(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& values,
                             const Eigen::MatrixXcd& vectors) {
  Eigen::VectorXd out(values.size());
  const Eigen::MatrixXcd hv = h * vectors;
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    out(n) = (hv.col(n) - values(n) * vectors.col(n)).cwiseAbs().maxCoeff();
  }
  return out;
}

// Column-normalizes right vectors and applies the inverse scaling to the rows
// of the left vectors so biorthogonality is kept.
void normalize_pair(Eigen::MatrixXcd& right, std::optional<Eigen::MatrixXcd>& left) {
  for (Eigen::Index n = 0; n < right.cols(); ++n) {
    Eigen::Index arg = 0;
    right.col(n).cwiseAbs().maxCoeff(&arg);
    const cplx pivot = right(arg, n);
    right.col(n) /= pivot;
    right(arg, n) = 1.0;
    if (left) left->row(n) *= pivot;
  }
}

double one_norm(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

void permute(EigenSystem& sys, const std::vector<int>& order) {
  const Eigen::Index n = sys.values.size();
  Eigen::VectorXcd values(n);
  Eigen::MatrixXcd right(sys.right.rows(), n);
  Eigen::VectorXd residuals(n);
  std::optional<Eigen::MatrixXcd> left;
  if (sys.left) left = Eigen::MatrixXcd(n, sys.left->cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    const int src = order[k];
    values(k) = sys.values(src);
    right.col(k) = sys.right.col(src);
    residuals(k) = sys.residuals.size() == n ? sys.residuals(src) : 0.0;
    if (left) left->row(k) = sys.left->row(src);
  }
  sys.values = std::move(values);
  sys.right = std::move(right);
  sys.residuals = std::move(residuals);
  sys.left = std::move(left);
}

}  // namespace

double infinity_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double EigenSystem::max_residual() const noexcept {
  return residuals.size() == 0 ? 0.0 : residuals.maxCoeff();
}

void normalize_columns(Eigen::MatrixXcd& vectors) {
  std::optional<Eigen::MatrixXcd> none;
  normalize_pair(vectors, none);
}

void certify(EigenSystem& sys, const Eigen::MatrixXcd& h, double tolerance) {
  sys.matrix_norm = infinity_norm(h);
  sys.residuals = residuals_of(h, sys.values, sys.right);
  const double bound = tolerance * std::max(sys.matrix_norm, std::numeric_limits<double>::min());
  for (Eigen::Index n = 0; n < sys.residuals.size(); ++n) {
    if (!(sys.residuals(n) <= bound)) {
      throw Error(ErrorCode::CertificationFailure,
                  "mode " + std::to_string(n + 1) + " residual " +
                      std::to_string(sys.residuals(n)) + " exceeds " + std::to_string(bound),
                  static_cast<long>(n));
    }
  }
}

void sort_modes(EigenSystem& sys, double tolerance) {
  const double quantum = tolerance * std::max(1.0, sys.matrix_norm);
  std::vector<int> order(sys.values.size());
  std::iota(order.begin(), order.end(), 0);
  const auto key = [&](int n) {
    return std::pair{std::round(sys.values(n).real() / quantum), sys.values(n).imag()};
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  permute(sys, order);
}

EigenSystem eigendecompose(const Eigen::MatrixXcd& h, const EigenOptions& options) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::ValidationError, "matrix must be square");
  }
  if (h.rows() < 1) {
    throw Error(ErrorCode::ValidationError, "matrix must be non-empty");
  }
  const Eigen::Index n = h.rows();

  detail::Balanced balanced = options.balance
                                  ? detail::balance(h)
                                  : detail::Balanced{h, Eigen::VectorXd::Ones(n)};

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(balanced.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "QR iteration did not converge");
  }

  EigenSystem sys;
  sys.values = solver.eigenvalues();
  const Eigen::MatrixXcd& vb = solver.eigenvectors();
  sys.right = balanced.scale.asDiagonal() * vb;
  if (options.compute_left) {
    // V_H^{-1} = V_B^{-1} S^{-1}; inverting the balanced basis keeps accuracy.
    Eigen::MatrixXcd wb = vb.fullPivLu().inverse();
    sys.left = wb * balanced.scale.cwiseInverse().asDiagonal();
  }
  normalize_pair(sys.right, sys.left);

  if (sys.left) {
    Eigen::MatrixXcd unit = sys.right;
    Eigen::VectorXd col_norms = unit.colwise().norm();
    for (Eigen::Index k = 0; k < n; ++k) unit.col(k) /= col_norms(k);
    Eigen::MatrixXcd unit_left = *sys.left;
    for (Eigen::Index k = 0; k < n; ++k) unit_left.row(k) *= col_norms(k);
    sys.condition_estimate = one_norm(unit) * one_norm(unit_left);
  }
  sys.ill_conditioned = sys.condition_estimate > kIllConditionedThreshold;

  certify(sys, h, options.residual_tolerance);
  sort_modes(sys);
  return sys;
}

std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXcd& values,
                                                double tolerance) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(values(i) - values(j)) < tolerance) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

double matched_max_deviation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ValidationError, "eigenvalue lists differ in length");
  }
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  // Hungarian algorithm, 1-based potentials formulation.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_cost(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  const auto cost = [&](int i, int j) { return std::abs(a(i - 1) - b(j - 1)); };
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) worst = std::max(worst, cost(p[j], j));
  return worst;
}

std::vector<RingModeSolution> ring_analytic_spectrum(const SegmentedRing& ring, HoppingRatio t) {
  const SegmentedRing valid = validate_ring(ring.segments);
  if (!valid.is_two_segment()) {
    throw Error(ErrorCode::NotTwoSegment,
                "analytic ring spectrum needs exactly one type-A and one type-B chain",
                static_cast<long>(valid.segments.size()));
  }
  const Hamiltonian h = build_ring_hamiltonian(valid, t);
  const double norm = infinity_norm(h.matrix);
  const int L = valid.size();
  const double tv = t.value();
  const double M = valid.total(ChainType::B);

  const auto profile_for = [&](cplx a_step, cplx b_step) {
    Eigen::VectorXcd v(L);
    v(0) = 1.0;
    for (int j = 0; j + 1 < L; ++j) {
      v(j + 1) = v(j) * (valid.bond_type(j) == ChainType::A ? a_step : b_step);
    }
    Eigen::MatrixXcd as_matrix = v;
    normalize_columns(as_matrix);
    return Eigen::VectorXcd(as_matrix.col(0));
  };
  const auto residual_of = [&](const Eigen::VectorXcd& v, cplx e) {
    return (h.matrix * v - e * v).cwiseAbs().maxCoeff();
  };

  std::vector<RingModeSolution> modes;
  modes.reserve(L);
  for (int n = 0; n < L; ++n) {
    RingModeSolution mode;
    mode.mode_index = n;
    mode.phase = 2.0 * kPi * n / L;
    mode.alpha = std::pow(tv, M / L) * std::polar(1.0, mode.phase);
    mode.energy = tv / mode.alpha + mode.alpha;

    // Either bulk root of the type-A recursion may carry the mode; the type-B
    // step follows from continuity (beta = root / t).
    const cplx root1 = mode.alpha;
    const cplx root2 = tv / mode.alpha;
    Eigen::VectorXcd first = profile_for(root1, root1 / tv);
    Eigen::VectorXcd second = profile_for(root2, root2 / tv);
    const double r1 = residual_of(first, mode.energy);
    const double r2 = residual_of(second, mode.energy);
    if (r1 <= r2) {
      mode.profile = std::move(first);
      mode.residual = r1;
    } else {
      mode.profile = std::move(second);
      mode.residual = r2;
    }
    if (mode.residual > kResidualTolerance * norm) {
      throw Error(ErrorCode::CertificationFailure,
                  "ring mode " + std::to_string(n) + " residual " + std::to_string(mode.residual),
                  n);
    }
    modes.push_back(std::move(mode));
  }
  return modes;
}

EigenSystem circulant_analytic_spectrum(const CirculantGraph& graph, HoppingRatio t) {
  const CirculantGraph valid = validate_circulant(graph.n_nodes, graph.offsets);
  const Hamiltonian h = build_circulant_hamiltonian(valid, t);
  const int N = valid.n_nodes;
  const double tv = t.value();
  const double r = std::pow(tv, -1.0 / N);
  const double theta = 2.0 * kPi / N;

  EigenSystem sys;
  sys.values = Eigen::VectorXcd::Zero(N);
  sys.right.resize(N, N);
  Eigen::MatrixXcd left(N, N);
  for (int n = 0; n < N; ++n) {
    for (int q = 1; q < N; ++q) {
      if (valid.offsets[q - 1] == 0) continue;
      sys.values(n) += std::pow(tv, static_cast<double>(N - q) / N) *
                       std::polar(1.0, theta * ((q * n) % N));
    }
    for (int m = 0; m < N; ++m) {
      const int k = (m * n) % N;
      sys.right(m, n) = std::pow(r, m) * std::polar(1.0, theta * k);
      // Inverse of the Vandermonde basis: (1/N) conj(F) D^{-1}.
      left(n, m) = std::pow(r, -m) * std::polar(1.0, -theta * k) / static_cast<double>(N);
    }
  }
  sys.left = std::move(left);
  normalize_pair(sys.right, sys.left);
  certify(sys, h.matrix);
  return sys;
}

ObcSpectrum obc_analytic_spectrum(const ObcChain& chain, HoppingRatio t) {
  const ObcChain valid = validate_obc_chain(chain.n_sites);
  const Hamiltonian h = build_obc_chain(valid, t);
  const int N = valid.n_sites;
  const double tv = t.value();
  const double norm = infinity_norm(h.matrix);

  const auto attempt = [&](int sign) {
    const double rho = std::pow(tv, 0.5 * sign);
    EigenSystem sys;
    sys.values.resize(N);
    sys.right.resize(N, N);
    Eigen::MatrixXcd left(N, N);
    for (int n = 1; n <= N; ++n) {
      const double theta = kPi * n / (N + 1);
      sys.values(n - 1) = 2.0 * std::sqrt(tv) * std::cos(theta);
      for (int m = 1; m <= N; ++m) {
        const double s = std::sin(m * theta);
        sys.right(m - 1, n - 1) = std::pow(rho, m) * s;
        left(n - 1, m - 1) = 2.0 / (N + 1) * std::pow(rho, -m) * s;
      }
    }
    sys.left = std::move(left);
    normalize_pair(sys.right, sys.left);
    sys.matrix_norm = norm;
    sys.residuals = residuals_of(h.matrix, sys.values, sys.right);
    return sys;
  };

  ObcSpectrum best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int sign : {+1, -1}) {
    EigenSystem sys = attempt(sign);
    if (sys.max_residual() < best_residual) {
      best_residual = sys.max_residual();
      best.system = std::move(sys);
      best.exponent_sign = sign;
    }
  }
  certify(best.system, h.matrix);
  return best;
}

ProductSpectrum kron_sum_spectrum(std::span<const EigenSystem> axis_systems) {
  if (axis_systems.size() < 2) {
    throw Error(ErrorCode::InvalidProduct, "Kronecker sum needs at least 2 axis systems");
  }
  EigenSystem acc = axis_systems[0];
  bool with_left = acc.left.has_value();
  for (std::size_t k = 1; k < axis_systems.size(); ++k) {
    const EigenSystem& axis = axis_systems[k];
    with_left = with_left && axis.left.has_value();
    const Eigen::Index na = acc.size();
    const Eigen::Index nb = axis.size();
    EigenSystem next;
    next.values.resize(na * nb);
    next.residuals.resize(na * nb);
    next.right.resize(acc.right.rows() * axis.right.rows(), na * nb);
    if (with_left) next.left = Eigen::MatrixXcd(na * nb, acc.left->cols() * axis.left->cols());
    for (Eigen::Index i = 0; i < na; ++i) {
      for (Eigen::Index j = 0; j < nb; ++j) {
        const Eigen::Index n = i * nb + j;
        next.values(n) = acc.values(i) + axis.values(j);
        next.residuals(n) = acc.residuals(i) + axis.residuals(j);
        next.right.col(n) = Eigen::kroneckerProduct(acc.right.col(i), axis.right.col(j));
        if (with_left) {
          next.left->row(n) = Eigen::kroneckerProduct(acc.left->row(i), axis.left->row(j));
        }
      }
    }
    next.matrix_norm = acc.matrix_norm + axis.matrix_norm;
    next.condition_estimate = acc.condition_estimate * axis.condition_estimate;
    acc = std::move(next);
  }
  acc.ill_conditioned = acc.condition_estimate > kIllConditionedThreshold;

  ProductSpectrum out;
  const auto groups =
      degenerate_groups(acc.values, kDegeneracyTolerance * std::max(1.0, acc.matrix_norm));
  out.degenerate_ambiguity = groups.size() != static_cast<std::size_t>(acc.size());
  out.system = std::move(acc);
  return out;
}

int least_damped_mode(const EigenSystem& sys, double tolerance) {
  if (sys.size() == 0) {
    throw Error(ErrorCode::ValidationError, "empty eigensystem");
  }
  const double tol = tolerance * std::max(1.0, sys.matrix_norm);
  int best = 0;
  for (int n = 1; n < sys.size(); ++n) {
    const cplx cur = sys.values(n);
    const cplx top = sys.values(best);
    if (cur.imag() > top.imag() + tol) {
      best = n;
    } else if (std::abs(cur.imag() - top.imag()) <= tol &&
               std::abs(cur.real()) < std::abs(top.real()) - tol) {
      best = n;
    }
  }
  return best;
}

}  // namespace decaygraph
