#include "decaygraph/lattice.hpp"

#include "decaygraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace decaygraph {

namespace {

void check_size(std::size_t dim, std::size_t size_cap) {
  if (dim > size_cap) {
    throw Error(ErrorCode::DimensionOverflow,
                "lattice has " + std::to_string(dim) + " nodes, cap is " +
                    std::to_string(size_cap),
                static_cast<long>(dim));
  }
}

// Adds the directed edge tail -> head to both the matrix and the edge list.
void couple(Hamiltonian& h, int tail, int head, double t, int axis = 0) {
  h.matrix(tail, head) = t;
  h.matrix(head, tail) = 1.0;
  h.edges.push_back({tail, head, axis});
}

void finish(Hamiltonian& h) { std::sort(h.edges.begin(), h.edges.end()); }

}  // namespace

HoppingRatio::HoppingRatio(double t) : t_(t) {
  if (!std::isfinite(t) || t <= 0.0) {
    throw Error(ErrorCode::HoppingOutOfRange, "t must be a positive finite number");
  }
  if (std::abs(t - 1.0) < 1e-12) {
    throw Error(ErrorCode::TrivialHopping, "t = 1 is reciprocal hopping");
  }
  if (t < kMinHopping || t > kMaxHopping) {
    throw Error(ErrorCode::HoppingOutOfRange,
                "t = " + show(t) + " outside [1/64, 64]");
  }
}

double HoppingRatio::log(double x) const noexcept { return std::log(x) / std::log(t_); }

int SegmentedRing::size() const noexcept {
  int total = 0;
  for (const auto& s : segments) total += s.length;
  return total;
}

int SegmentedRing::total(ChainType type) const noexcept {
  int total = 0;
  for (const auto& s : segments) {
    if (s.type == type) total += s.length;
  }
  return total;
}

int SegmentedRing::segment_start(std::size_t s) const {
  int start = 0;
  for (std::size_t i = 0; i < s; ++i) start += segments.at(i).length;
  return start;
}

ChainType SegmentedRing::bond_type(int i) const {
  int start = 0;
  for (const auto& s : segments) {
    if (i < start + s.length) return s.type;
    start += s.length;
  }
  throw Error(ErrorCode::InvalidRing, "bond index out of range", i);
}

int CirculantGraph::degree() const noexcept {
  return std::accumulate(offsets.begin(), offsets.end(), 0);
}

SegmentedRing validate_ring(std::vector<Segment> segments) {
  if (segments.empty()) {
    throw Error(ErrorCode::InvalidRing, "ring needs at least one segment");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].length < 1) {
      throw Error(ErrorCode::InvalidRing,
                  "segment " + std::to_string(i + 1) + " has non-positive length",
                  static_cast<long>(i));
    }
  }
  if (segments.size() > 1) {
    // Around the ring the last segment touches the first one.
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& next = segments[(i + 1) % segments.size()];
      if (segments[i].type == next.type) {
        throw Error(ErrorCode::InvalidRing,
                    "segments " + std::to_string(i + 1) + " and " +
                        std::to_string((i + 1) % segments.size() + 1) +
                        " have the same chain type; merge them",
                    static_cast<long>(i));
      }
    }
  }
  SegmentedRing ring{std::move(segments)};
  // Two sites would put both ring bonds on the same node pair.
  if (ring.size() < 3) {
    throw Error(ErrorCode::InvalidRing, "ring needs at least 3 sites");
  }
  return ring;
}

CirculantGraph validate_circulant(int n_nodes, std::vector<int> offsets) {
  if (n_nodes < 2) {
    throw Error(ErrorCode::ValidationError, "circulant graph needs at least 2 nodes");
  }
  if (static_cast<int>(offsets.size()) != n_nodes - 1) {
    throw Error(ErrorCode::ValidationError,
                "connectivity vector must have length N-1 = " + std::to_string(n_nodes - 1));
  }
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i] != 0 && offsets[i] != 1) {
      throw Error(ErrorCode::ValidationError, "connectivity entries must be 0 or 1",
                  static_cast<long>(i + 1));
    }
  }
  for (int q = 1; q <= n_nodes - 1; ++q) {
    if (offsets[q - 1] != offsets[n_nodes - q - 1]) {
      throw Error(ErrorCode::SymmetryViolation,
                  "a_" + std::to_string(q) + " != a_" + std::to_string(n_nodes - q), q);
    }
  }
  if (std::none_of(offsets.begin(), offsets.end(), [](int a) { return a == 1; })) {
    throw Error(ErrorCode::EmptyConnectivity, "all connectivity entries are zero");
  }
  return CirculantGraph{n_nodes, std::move(offsets)};
}

ObcChain validate_obc_chain(int n_sites) {
  if (n_sites < 2) {
    throw Error(ErrorCode::InvalidChain, "open chain needs at least 2 sites");
  }
  return ObcChain{n_sites};
}

int geometry_size(const Geometry& geometry) noexcept {
  struct {
    int operator()(const SegmentedRing& r) const { return r.size(); }
    int operator()(const CirculantGraph& g) const { return g.n_nodes; }
    int operator()(const ObcChain& c) const { return c.n_sites; }
  } visitor;
  return std::visit(visitor, geometry);
}

std::size_t ProductLattice::size() const noexcept {
  std::size_t total = 1;
  for (const auto& axis : axes) total *= static_cast<std::size_t>(axis.size());
  return total;
}

std::vector<int> ProductLattice::coordinates(int node) const {
  std::vector<int> coords(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const int n = axes[k].size();
    coords[k] = node % n;
    node /= n;
  }
  return coords;
}

int ProductLattice::node(std::span<const int> coords) const {
  int index = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) index = index * axes[k].size() + coords[k];
  return index;
}

ProductLattice validate_product(std::vector<Lattice1D> axes) {
  if (axes.size() < 2) {
    throw Error(ErrorCode::InvalidProduct, "product lattice needs at least 2 axes");
  }
  return ProductLattice{std::move(axes)};
}

Hamiltonian build_ring_hamiltonian(const SegmentedRing& ring, HoppingRatio t,
                                   std::size_t size_cap) {
  const SegmentedRing valid = validate_ring(ring.segments);
  const int L = valid.size();
  check_size(static_cast<std::size_t>(L), size_cap);

  Hamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(L, L);
  h.axis_t = {t.value()};
  h.labels.reserve(L);
  int node = 0;
  for (std::size_t s = 0; s < valid.segments.size(); ++s) {
    const auto& seg = valid.segments[s];
    for (int p = 0; p < seg.length; ++p, ++node) {
      h.labels.push_back({static_cast<int>(s), p, {}});
      const int next = (node + 1) % L;
      // Type-A bonds point back along the node order, type-B bonds forward.
      if (seg.type == ChainType::A) {
        couple(h, next, node, t.value());
      } else {
        couple(h, node, next, t.value());
      }
    }
  }
  finish(h);
  return h;
}

Hamiltonian build_circulant_hamiltonian(const CirculantGraph& graph, HoppingRatio t,
                                        std::size_t size_cap) {
  const CirculantGraph valid = validate_circulant(graph.n_nodes, graph.offsets);
  const int N = valid.n_nodes;
  check_size(static_cast<std::size_t>(N), size_cap);

  Hamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(N, N);
  h.axis_t = {t.value()};
  for (int a = 0; a < N; ++a) h.labels.push_back({-1, a, {}});
  for (int a = 0; a < N; ++a) {
    for (int b = a + 1; b < N; ++b) {
      if (valid.offsets[b - a - 1] == 1) couple(h, a, b, t.value());
    }
  }
  finish(h);
  return h;
}

Hamiltonian build_obc_chain(const ObcChain& chain, HoppingRatio t, std::size_t size_cap) {
  const ObcChain valid = validate_obc_chain(chain.n_sites);
  const int N = valid.n_sites;
  check_size(static_cast<std::size_t>(N), size_cap);

  Hamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(N, N);
  h.axis_t = {t.value()};
  for (int i = 0; i < N; ++i) h.labels.push_back({-1, i, {}});
  for (int i = 0; i + 1 < N; ++i) couple(h, i + 1, i, t.value());
  finish(h);
  return h;
}

Hamiltonian build_lattice(const Lattice1D& lattice, std::size_t size_cap) {
  struct {
    HoppingRatio t;
    std::size_t cap;
    Hamiltonian operator()(const SegmentedRing& r) const {
      return build_ring_hamiltonian(r, t, cap);
    }
    Hamiltonian operator()(const CirculantGraph& g) const {
      return build_circulant_hamiltonian(g, t, cap);
    }
    Hamiltonian operator()(const ObcChain& c) const { return build_obc_chain(c, t, cap); }
  } visitor{lattice.t, size_cap};
  return std::visit(visitor, lattice.geometry);
}

Hamiltonian build_product_lattice(const ProductLattice& product, std::size_t size_cap) {
  const ProductLattice valid = validate_product(product.axes);
  // Checked axis by axis so huge products fail before any allocation.
  std::size_t dim = 1;
  for (const auto& axis : valid.axes) {
    dim *= static_cast<std::size_t>(axis.size());
    check_size(dim, size_cap);
  }

  std::vector<Hamiltonian> axis_h;
  axis_h.reserve(valid.axes.size());
  for (const auto& axis : valid.axes) axis_h.push_back(build_lattice(axis, size_cap));

  const int n = static_cast<int>(dim);
  Hamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& axis : valid.axes) h.axis_t.push_back(axis.t.value());
  h.labels.reserve(n);
  for (int node = 0; node < n; ++node) h.labels.push_back({-1, node, valid.coordinates(node)});

  // Identity on every other axis: each axis edge is replicated once per
  // combination of the remaining coordinates.
  for (int node = 0; node < n; ++node) {
    std::vector<int> coords = valid.coordinates(node);
    for (std::size_t k = 0; k < valid.axes.size(); ++k) {
      const int own = coords[k];
      for (const auto& e : axis_h[k].edges) {
        if (e.tail != own) continue;
        std::vector<int> head_coords = coords;
        head_coords[k] = e.head;
        couple(h, node, valid.node(head_coords), valid.axes[k].t.value(), static_cast<int>(k));
      }
    }
  }
  finish(h);
  return h;
}

Hamiltonian build(const LatticeSpec& spec, std::size_t size_cap) {
  struct {
    std::size_t cap;
    Hamiltonian operator()(const Lattice1D& l) const { return build_lattice(l, cap); }
    Hamiltonian operator()(const ProductLattice& p) const {
      return build_product_lattice(p, cap);
    }
    Hamiltonian operator()(const RawMatrix& raw) const {
      if (raw.matrix.rows() != raw.matrix.cols() || raw.matrix.rows() < 1) {
        throw Error(ErrorCode::ValidationError, "raw matrix must be square and non-empty");
      }
      check_size(static_cast<std::size_t>(raw.matrix.rows()), cap);
      Hamiltonian h;
      h.matrix = raw.matrix;
      for (int i = 0; i < raw.matrix.rows(); ++i) h.labels.push_back({-1, i, {}});
      return h;
    }
  } visitor{size_cap};
  return std::visit(visitor, spec);
}

std::vector<DirectedEdge> edge_list(const Hamiltonian& h) {
  if (h.axis_t.empty()) {
    throw Error(ErrorCode::IneligibleSpec, "raw matrices carry no orientation convention");
  }
  const auto same = [](std::complex<double> z, double v) {
    return std::abs(z - v) <= 1e-12 * std::max(1.0, std::abs(v));
  };
  std::vector<DirectedEdge> edges;
  const int n = h.dim();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto hab = h.matrix(a, b);
      const auto hba = h.matrix(b, a);
      if (hab == 0.0 && hba == 0.0) continue;

      int axis = 0;
      if (h.axis_t.size() > 1) {
        const auto& ca = h.labels[a].axis_coords;
        const auto& cb = h.labels[b].axis_coords;
        int differing = 0;
        for (std::size_t k = 0; k < ca.size(); ++k) {
          if (ca[k] != cb[k]) {
            axis = static_cast<int>(k);
            ++differing;
          }
        }
        if (differing != 1) {
          throw Error(ErrorCode::InconsistentEntries,
                      "coupled nodes " + std::to_string(a + 1) + ", " + std::to_string(b + 1) +
                          " differ along more than one axis",
                      a);
        }
      }
      const double t = h.axis_t[axis];
      if (same(hab, t) && same(hba, 1.0)) {
        edges.push_back({a, b, axis});
      } else if (same(hab, 1.0) && same(hba, t)) {
        edges.push_back({b, a, axis});
      } else {
        throw Error(ErrorCode::InconsistentEntries,
                    "entries of pair (" + std::to_string(a + 1) + ", " + std::to_string(b + 1) +
                        ") are not {t, 1}",
                    a);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

SegmentedRing reverse_orientation(const SegmentedRing& ring) {
  SegmentedRing reversed = ring;
  for (auto& s : reversed.segments) s.type = opposite(s.type);
  return reversed;
}

}  // namespace decaygraph
