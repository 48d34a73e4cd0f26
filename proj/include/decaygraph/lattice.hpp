#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace decaygraph {

inline constexpr std::size_t kDefaultSizeCap = 4096;
inline constexpr double kMinHopping = 1.0 / 64.0;
inline constexpr double kMaxHopping = 64.0;

// Normalized non-reciprocal hopping ratio t = t_r / t_l. Restricted to
// [1/64, 64] with t = 1 (the reciprocal case) rejected.
class HoppingRatio {
 public:
  explicit HoppingRatio(double t);

  double value() const noexcept { return t_; }
  // log base t
  double log(double x) const noexcept;

  friend bool operator==(const HoppingRatio&, const HoppingRatio&) = default;

 private:
  double t_;
};

enum class ChainType { A, B };

inline ChainType opposite(ChainType type) noexcept {
  return type == ChainType::A ? ChainType::B : ChainType::A;
}

struct Segment {
  ChainType type;
  int length;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Directed ring made of alternating type-A / type-B chains. Nodes are numbered
// in segment order; segment s owns the bonds leaving each of its sites towards
// the next site, so the wrap bond belongs to the last segment.
struct SegmentedRing {
  std::vector<Segment> segments;

  int size() const noexcept;
  int total(ChainType type) const noexcept;
  // 0-based index of the first site of segment s.
  int segment_start(std::size_t s) const;
  bool is_two_segment() const noexcept { return segments.size() == 2; }
  // Chain type of the bond (i, i+1 mod L).
  ChainType bond_type(int i) const;

  friend bool operator==(const SegmentedRing&, const SegmentedRing&) = default;
};

// Circulant connectivity: offsets[q-1] = a_q for q = 1..N-1.
struct CirculantGraph {
  int n_nodes = 0;
  std::vector<int> offsets;

  int degree() const noexcept;

  friend bool operator==(const CirculantGraph&, const CirculantGraph&) = default;
};

struct ObcChain {
  int n_sites = 0;

  friend bool operator==(const ObcChain&, const ObcChain&) = default;
};

SegmentedRing validate_ring(std::vector<Segment> segments);
CirculantGraph validate_circulant(int n_nodes, std::vector<int> offsets);
ObcChain validate_obc_chain(int n_sites);

using Geometry = std::variant<SegmentedRing, CirculantGraph, ObcChain>;

int geometry_size(const Geometry& geometry) noexcept;

struct Lattice1D {
  Geometry geometry;
  HoppingRatio t;

  int size() const noexcept { return geometry_size(geometry); }

  friend bool operator==(const Lattice1D&, const Lattice1D&) = default;
};

// Axis 0 is the slowest-varying index: node = ((c0 * n1) + c1) * n2 + c2 ...
struct ProductLattice {
  std::vector<Lattice1D> axes;

  std::size_t size() const noexcept;
  std::vector<int> coordinates(int node) const;
  int node(std::span<const int> coords) const;

  friend bool operator==(const ProductLattice&, const ProductLattice&) = default;
};

ProductLattice validate_product(std::vector<Lattice1D> axes);

// Escape hatch for hand-written matrices. Never eligible for pure-decay or
// charge analysis.
struct RawMatrix {
  Eigen::MatrixXcd matrix;

  friend bool operator==(const RawMatrix& a, const RawMatrix& b) {
    return a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() &&
           a.matrix == b.matrix;
  }
};

using LatticeSpec = std::variant<Lattice1D, ProductLattice, RawMatrix>;

// Edge (tail -> head) means H[tail, head] = t and H[head, tail] = 1.
struct DirectedEdge {
  int tail;
  int head;
  int axis = 0;

  friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

struct NodeLabel {
  int segment = -1;   // ring segment, -1 otherwise
  int position = 0;   // position within segment, or node index for other 1D kinds
  std::vector<int> axis_coords;  // product lattices only
};

struct Hamiltonian {
  Eigen::MatrixXcd matrix;
  std::vector<DirectedEdge> edges;
  std::vector<NodeLabel> labels;
  std::vector<double> axis_t;  // one entry per axis; empty for raw matrices

  int dim() const noexcept { return static_cast<int>(matrix.rows()); }
};

Hamiltonian build_ring_hamiltonian(const SegmentedRing& ring, HoppingRatio t,
                                   std::size_t size_cap = kDefaultSizeCap);
Hamiltonian build_circulant_hamiltonian(const CirculantGraph& graph, HoppingRatio t,
                                        std::size_t size_cap = kDefaultSizeCap);
Hamiltonian build_obc_chain(const ObcChain& chain, HoppingRatio t,
                            std::size_t size_cap = kDefaultSizeCap);
Hamiltonian build_lattice(const Lattice1D& lattice, std::size_t size_cap = kDefaultSizeCap);
Hamiltonian build_product_lattice(const ProductLattice& product,
                                  std::size_t size_cap = kDefaultSizeCap);
Hamiltonian build(const LatticeSpec& spec, std::size_t size_cap = kDefaultSizeCap);

// Recovers the directed edges from the matrix entries. Throws
// InconsistentEntries when a coupled pair is not {t, 1}.
std::vector<DirectedEdge> edge_list(const Hamiltonian& h);

// Swaps every type-A segment for type-B and vice versa.
SegmentedRing reverse_orientation(const SegmentedRing& ring);

}  // namespace decaygraph
