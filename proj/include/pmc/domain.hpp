#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pmc {

/// A point of the grid's ambient space. One-dimensional domains leave the
/// second coordinate at zero.
using Point = std::array<double, 2>;

enum class Shape { interval, rectangle, disc };
enum class NodeClass { interior, boundary, exterior };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

/// Geometry and resolution of a domain. `nodes` counts grid nodes per axis
/// across the bounding box (for a disc, the box [center - r, center + r]).
struct DomainSpec {
  Shape shape = Shape::rectangle;
  Point lower{0.0, 0.0};
  Point upper{1.0, 1.0};
  Point center{0.0, 0.0};
  double radius = 1.0;
  std::array<int, 2> nodes{17, 17};

  int dim() const { return shape == Shape::interval ? 1 : 2; }

  static DomainSpec interval(double a, double b, int n);
  static DomainSpec rectangle(Point lower, Point upper, int nx, int ny);
  static DomainSpec square(double a, double b, int n) { return rectangle({a, a}, {b, b}, n, n); }
  static DomainSpec disc(Point center, double radius, int n);
  /// Disc whose bounding-box grid has spacing as close to `dx` as an odd node
  /// count allows.
  static DomainSpec disc_with_spacing(Point center, double radius, double dx);

  bool operator==(const DomainSpec&) const = default;
};

struct StencilTerm {
  int node;
  double weight;
};

/// Compressed per-node table of finite-difference weights.
class StencilTable {
 public:
  StencilTable() = default;
  explicit StencilTable(std::size_t nodes) : offsets_(nodes + 1, 0) {}

  std::span<const StencilTerm> row(int node) const {
    return {terms_.data() + offsets_[node], terms_.data() + offsets_[node + 1]};
  }
  double apply(int node, std::span<const double> values) const {
    double s = 0.0;
    for (const auto& t : row(node)) s += t.weight * values[t.node];
    return s;
  }

 private:
  friend class Domain;
  std::vector<std::size_t> offsets_;
  std::vector<StencilTerm> terms_;
};

enum class StencilKind {
  d1_x,       // first derivative along axis 0
  d1_y,       // first derivative along axis 1
  d2_xx,
  d2_yy,
  d2_xy,      // centred cross stencil (one-sided quadrant at curved-boundary nodes)
  d2_xy_pos,  // seven-point mixed stencil along the (+,+) diagonal
  d2_xy_neg,  // seven-point mixed stencil along the (+,-) diagonal
  flux_x,     // first derivative that avoids boundary nodes; used on flux fields
  flux_y,
};
inline constexpr std::size_t kStencilKinds = 9;

inline StencilKind d1_kind(int axis) { return axis == 0 ? StencilKind::d1_x : StencilKind::d1_y; }
inline StencilKind d2_kind(int axis) { return axis == 0 ? StencilKind::d2_xx : StencilKind::d2_yy; }
inline StencilKind flux_kind(int axis) { return axis == 0 ? StencilKind::flux_x : StencilKind::flux_y; }

/// Structured discretisation of an interval, rectangle or disc.
///
/// Nodes are either interior (unknowns of every discrete problem) or
/// boundary. On rectangles the boundary nodes are the grid nodes on the
/// edges. On discs the boundary nodes are the points where grid lines leaving
/// an interior node cross the circle (Shortley-Weller arms), plus grid nodes
/// lying on the circle. Grid nodes outside the domain are exterior and carry
/// no value.
class Domain {
 public:
  struct Arm {
    int node = -1;      // neighbouring node, -1 if none
    double frac = 0.0;  // arm length in units of the grid spacing, in (0, 1]
  };

  const DomainSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }
  Shape shape() const { return spec_.shape; }
  const Point& spacing() const { return spacing_; }
  double min_spacing() const;
  double diameter() const;
  std::array<int, 2> grid_nodes() const { return {nx_, ny_}; }

  std::size_t node_count() const { return positions_.size(); }
  std::span<const int> interior() const { return interior_; }
  std::span<const int> boundary() const { return boundary_; }
  int interior_index(int node) const { return interior_index_[node]; }

  const Point& position(int node) const { return positions_[node]; }
  NodeClass node_class(int node) const {
    return interior_index_[node] >= 0 ? NodeClass::interior : NodeClass::boundary;
  }
  /// Grid-aligned node at (i, j) or -1 if the grid node is exterior or out of range.
  int grid_node(int i, int j) const;
  NodeClass grid_class(int i, int j) const;
  /// Grid index of a node, or {-1, -1} for off-grid boundary points.
  std::array<int, 2> grid_index(int node) const { return grid_index_[node]; }

  /// Neighbour along `axis` on `side` (0 = negative, 1 = positive direction).
  Arm arm(int node, int axis, int side) const { return arms_[node][axis][side]; }

  /// Dual-cell quadrature weight: the node's dual cell clipped to the domain.
  /// On discs, clipped cells of exterior and on-circle grid points go to the
  /// nearest boundary node, so the weights sum to the exact area.
  double quadrature_weight(int node) const { return weights_[node]; }
  double measure() const;

  /// True for nodes whose derivative stencils are their own rather than
  /// copied from an adjacent interior node (curved-boundary points).
  bool has_own_stencil(int node) const { return owner_[node] == node; }

  const StencilTable& stencil(StencilKind kind) const {
    return stencils_[static_cast<std::size_t>(kind)];
  }

  bool contains(const Point& x) const;

  /// Bilinear (linear in 1-D) interpolation weights at `x` over grid-aligned
  /// nodes. Returns false if the enclosing cell has an exterior corner.
  bool interpolation_weights(const Point& x, std::vector<StencilTerm>& out) const;

 private:
  friend std::shared_ptr<const Domain> build_domain(const DomainSpec& spec);
  Domain() = default;

  void classify_nodes();
  void build_arms();
  void build_weights();
  void build_stencils();

  int add_node(const Point& x, std::array<int, 2> gidx, bool interior);

  DomainSpec spec_;
  Point spacing_{0.0, 0.0};
  int nx_ = 0;
  int ny_ = 1;

  std::vector<Point> positions_;
  std::vector<std::array<int, 2>> grid_index_;
  std::vector<int> interior_index_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
  std::vector<int> grid_map_;  // nx*ny, -1 for exterior
  std::vector<std::array<std::array<Arm, 2>, 2>> arms_;
  std::vector<double> weights_;
  std::vector<int> owner_;
  std::array<StencilTable, kStencilKinds> stencils_;
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Builds and validates a domain. Throws std::invalid_argument for fewer than
/// 9 nodes per axis, non-positive extent, or a disc radius not exceeding two
/// grid spacings.
DomainPtr build_domain(const DomainSpec& spec);

}  // namespace pmc
