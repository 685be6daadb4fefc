#include "pmc/domain.hpp"

#include "fd_weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pmc {

namespace {

// Grid nodes closer than this fraction of a spacing to the circle are treated
// as lying on it.
constexpr double kSnapFraction = 1e-4;
constexpr int kMinNodes = 9;

using Row = std::vector<StencilTerm>;

void add_scaled(Row& dst, std::span<const StencilTerm> src, double scale) {
  for (const auto& t : src) dst.push_back({t.node, scale * t.weight});
}

Row merged(Row row) {
  std::map<int, double> acc;
  for (const auto& t : row) acc[t.node] += t.weight;
  Row out;
  out.reserve(acc.size());
  for (const auto& [node, w] : acc)
    if (w != 0.0) out.push_back({node, w});
  return out;
}

Row weighted(std::span<const int> nodes, std::span<const double> weights) {
  Row row;
  for (std::size_t k = 0; k < nodes.size(); ++k) row.push_back({nodes[k], weights[k]});
  return row;
}

}  // namespace

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::interval: return "interval";
    case Shape::rectangle: return "rectangle";
    case Shape::disc: return "disc";
  }
  return "unknown";
}

Shape shape_from_string(const std::string& name) {
  if (name == "interval") return Shape::interval;
  if (name == "rectangle") return Shape::rectangle;
  if (name == "disc") return Shape::disc;
  throw std::invalid_argument("unknown domain shape '" + name + "'");
}

DomainSpec DomainSpec::interval(double a, double b, int n) {
  DomainSpec s;
  s.shape = Shape::interval;
  s.lower = {a, 0.0};
  s.upper = {b, 0.0};
  s.nodes = {n, 1};
  return s;
}

DomainSpec DomainSpec::rectangle(Point lower, Point upper, int nx, int ny) {
  DomainSpec s;
  s.shape = Shape::rectangle;
  s.lower = lower;
  s.upper = upper;
  s.nodes = {nx, ny};
  return s;
}

DomainSpec DomainSpec::disc(Point center, double radius, int n) {
  DomainSpec s;
  s.shape = Shape::disc;
  s.center = center;
  s.radius = radius;
  s.nodes = {n, n};
  return s;
}

DomainSpec DomainSpec::disc_with_spacing(Point center, double radius, double dx) {
  int intervals = static_cast<int>(std::lround(2.0 * radius / dx));
  if (intervals % 2 != 0) ++intervals;
  return disc(center, radius, intervals + 1);
}

double Domain::min_spacing() const {
  return dim() == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double Domain::diameter() const {
  switch (spec_.shape) {
    case Shape::interval: return spec_.upper[0] - spec_.lower[0];
    case Shape::rectangle: return std::hypot(spec_.upper[0] - spec_.lower[0], spec_.upper[1] - spec_.lower[1]);
    case Shape::disc: return 2.0 * spec_.radius;
  }
  return 0.0;
}

double Domain::measure() const {
  double m = 0.0;
  for (double w : weights_) m += w;
  return m;
}

int Domain::grid_node(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return grid_map_[static_cast<std::size_t>(j) * nx_ + i];
}

NodeClass Domain::grid_class(int i, int j) const {
  const int id = grid_node(i, j);
  return id < 0 ? NodeClass::exterior : node_class(id);
}

bool Domain::contains(const Point& x) const {
  switch (spec_.shape) {
    case Shape::interval: return x[0] >= spec_.lower[0] && x[0] <= spec_.upper[0];
    case Shape::rectangle:
      return x[0] >= spec_.lower[0] && x[0] <= spec_.upper[0] && x[1] >= spec_.lower[1] &&
             x[1] <= spec_.upper[1];
    case Shape::disc:
      return std::hypot(x[0] - spec_.center[0], x[1] - spec_.center[1]) <= spec_.radius;
  }
  return false;
}

int Domain::add_node(const Point& x, std::array<int, 2> gidx, bool interior) {
  const int id = static_cast<int>(positions_.size());
  positions_.push_back(x);
  grid_index_.push_back(gidx);
  if (interior) {
    interior_index_.push_back(static_cast<int>(interior_.size()));
    interior_.push_back(id);
  } else {
    interior_index_.push_back(-1);
    boundary_.push_back(id);
  }
  arms_.emplace_back();
  owner_.push_back(id);
  return id;
}

void Domain::classify_nodes() {
  Point lower{};
  Point upper{};
  if (spec_.shape == Shape::disc) {
    lower = {spec_.center[0] - spec_.radius, spec_.center[1] - spec_.radius};
    upper = {spec_.center[0] + spec_.radius, spec_.center[1] + spec_.radius};
    nx_ = ny_ = spec_.nodes[0];
  } else {
    lower = spec_.lower;
    upper = spec_.upper;
    nx_ = spec_.nodes[0];
    ny_ = spec_.shape == Shape::interval ? 1 : spec_.nodes[1];
  }
  spacing_[0] = (upper[0] - lower[0]) / (nx_ - 1);
  spacing_[1] = dim() == 2 ? (upper[1] - lower[1]) / (ny_ - 1) : 0.0;

  auto grid_point = [&](int i, int j) -> Point {
    Point x{lower[0] + (upper[0] - lower[0]) * i / (nx_ - 1), 0.0};
    if (dim() == 2) x[1] = lower[1] + (upper[1] - lower[1]) * j / (ny_ - 1);
    return x;
  };

  std::vector<NodeClass> cls(static_cast<std::size_t>(nx_) * ny_, NodeClass::exterior);
  auto at = [&](int i, int j) -> NodeClass& { return cls[static_cast<std::size_t>(j) * nx_ + i]; };

  if (spec_.shape == Shape::disc) {
    const double snap = kSnapFraction * spacing_[0];
    std::vector<char> on_circle(cls.size(), 0);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        const Point x = grid_point(i, j);
        const double d = spec_.radius - std::hypot(x[0] - spec_.center[0], x[1] - spec_.center[1]);
        if (d > snap)
          at(i, j) = NodeClass::interior;
        else if (d >= -snap)
          on_circle[static_cast<std::size_t>(j) * nx_ + i] = 1;
      }
    // Grid nodes on the circle are kept only where an interior node uses them.
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        if (!on_circle[static_cast<std::size_t>(j) * nx_ + i]) continue;
        const bool used = (i > 0 && at(i - 1, j) == NodeClass::interior) ||
                          (i + 1 < nx_ && at(i + 1, j) == NodeClass::interior) ||
                          (j > 0 && at(i, j - 1) == NodeClass::interior) ||
                          (j + 1 < ny_ && at(i, j + 1) == NodeClass::interior);
        if (used) at(i, j) = NodeClass::boundary;
      }
  } else {
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        const bool edge = i == 0 || i == nx_ - 1 || (dim() == 2 && (j == 0 || j == ny_ - 1));
        at(i, j) = edge ? NodeClass::boundary : NodeClass::interior;
      }
  }

  grid_map_.assign(cls.size(), -1);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      const NodeClass c = at(i, j);
      if (c == NodeClass::exterior) continue;
      grid_map_[static_cast<std::size_t>(j) * nx_ + i] =
          add_node(grid_point(i, j), {i, j}, c == NodeClass::interior);
    }
}

void Domain::build_arms() {
  const std::size_t grid_count = positions_.size();
  for (std::size_t id = 0; id < grid_count; ++id) {
    const auto [i, j] = grid_index_[id];
    for (int a = 0; a < dim(); ++a)
      for (int side = 0; side < 2; ++side) {
        const int step = side == 0 ? -1 : 1;
        const int nb = a == 0 ? grid_node(i + step, j) : grid_node(i, j + step);
        if (nb >= 0) arms_[id][a][side] = {nb, 1.0};
      }
  }
  if (spec_.shape != Shape::disc) return;

  const Point c = spec_.center;
  const double r = spec_.radius;
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const int id = interior_[k];
    for (int a = 0; a < 2; ++a)
      for (int side = 0; side < 2; ++side) {
        if (arms_[id][a][side].node >= 0) continue;
        const Point x = positions_[id];
        const int o = 1 - a;
        const double s = side == 0 ? -1.0 : 1.0;
        const double half_chord = std::sqrt(std::max(0.0, r * r - (x[o] - c[o]) * (x[o] - c[o])));
        Point b = x;
        b[a] = c[a] + s * half_chord;
        const double frac = std::clamp(std::abs(b[a] - x[a]) / spacing_[a], 1e-300, 1.0);
        const int bid = add_node(b, {-1, -1}, false);
        owner_[bid] = id;
        arms_[id][a][side] = {bid, frac};
      }
  }
  // Grid nodes on the circle borrow derivative stencils from a neighbour.
  for (int id : boundary_) {
    if (grid_index_[id][0] < 0) continue;
    for (int a = 0; a < 2 && owner_[id] == id; ++a)
      for (int side = 0; side < 2; ++side) {
        const int nb = arms_[id][a][side].node;
        if (nb >= 0 && interior_index_[nb] >= 0) {
          owner_[id] = nb;
          break;
        }
      }
  }
}

namespace {

// Area of the disc of radius r centred at the origin intersected with
// [x0, x1] x [y0, y1].
double disc_rect_area(double r, double x0, double x1, double y0, double y1) {
  auto prim = [r](double x) {
    const double xc = std::clamp(x, -r, r);
    return 0.5 * (xc * std::sqrt(std::max(0.0, r * r - xc * xc)) + r * r * std::asin(xc / r));
  };
  std::vector<double> cuts{x0, x1, -r, r};
  for (double y : {y0, y1})
    if (std::abs(y) < r) {
      const double c = std::sqrt(r * r - y * y);
      cuts.push_back(-c);
      cuts.push_back(c);
    }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = std::max(cuts[k], x0), b = std::min(cuts[k + 1], x1);
    if (b <= a) continue;
    const double m = 0.5 * (a + b);
    if (std::abs(m) >= r) continue;
    const double half = std::sqrt(r * r - m * m);
    const double top = std::min(y1, half), bot = std::max(y0, -half);
    if (top <= bot) continue;
    const double arc = prim(b) - prim(a);
    area += (y1 < half ? y1 * (b - a) : arc) - (y0 > -half ? y0 * (b - a) : -arc);
  }
  return area;
}

}  // namespace

void Domain::build_weights() {
  weights_.assign(positions_.size(), 0.0);
  if (spec_.shape != Shape::disc) {
    for (std::size_t id = 0; id < positions_.size(); ++id) {
      double w = 1.0;
      for (int a = 0; a < dim(); ++a) {
        double len = 0.0;
        for (int side = 0; side < 2; ++side)
          if (arms_[id][a][side].node >= 0) len += 0.5 * spacing_[a];
        w *= len;
      }
      weights_[id] = w;
    }
    return;
  }
  // Each grid point owns its dual cell clipped to the disc. Cells of grid
  // points that are not interior pass their area to the nearest boundary node.
  const Point c = spec_.center;
  const double r = spec_.radius;
  const double hx = spacing_[0], hy = spacing_[1];
  const double x_lo = c[0] - r, y_lo = c[1] - r;
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      const double x = x_lo + 2.0 * r * i / (nx_ - 1) - c[0];
      const double y = y_lo + 2.0 * r * j / (ny_ - 1) - c[1];
      const double area = disc_rect_area(r, x - 0.5 * hx, x + 0.5 * hx, y - 0.5 * hy, y + 0.5 * hy);
      if (area <= 0.0) continue;
      int target = grid_node(i, j);
      if (target < 0 || interior_index_[target] < 0) {
        double best = 1e300;
        for (int id : boundary_) {
          const double dist = std::hypot(positions_[id][0] - c[0] - x, positions_[id][1] - c[1] - y);
          if (dist < best) {
            best = dist;
            target = id;
          }
        }
      }
      weights_[target] += area;
    }
}

void Domain::build_stencils() {
  const std::size_t n = positions_.size();
  std::array<std::vector<Row>, kStencilKinds> rows;
  for (auto& r : rows) r.assign(n, {});
  auto rows_of = [&](StencilKind k) -> std::vector<Row>& { return rows[static_cast<std::size_t>(k)]; };

  // Node `steps` grid steps away from `id` along `axis`.
  auto line_node = [&](int id, int axis, int steps) {
    const auto [i, j] = grid_index_[id];
    if (i < 0) return -1;
    return axis == 0 ? grid_node(i + steps, j) : grid_node(i, j + steps);
  };
  auto is_interior = [&](int id) { return id >= 0 && interior_index_[id] >= 0; };

  // First and second derivatives along each axis.
  for (std::size_t uid = 0; uid < n; ++uid) {
    const int id = static_cast<int>(uid);
    if (!has_own_stencil(id)) continue;
    for (int a = 0; a < dim(); ++a) {
      const double h = spacing_[a];
      const Arm m = arms_[id][a][0];
      const Arm p = arms_[id][a][1];
      Row d1;
      Row d2;
      Row flux;
      if (m.node >= 0 && p.node >= 0) {
        const std::array<int, 3> nodes{m.node, id, p.node};
        const std::array<double, 3> xs{-m.frac * h, 0.0, p.frac * h};
        d2 = weighted(nodes, detail::fd_weights(0.0, xs, 2));
        const bool regular = m.frac == 1.0 && p.frac == 1.0;
        const int short_side = regular ? -1 : (m.frac < 1.0 && p.frac < 1.0 ? 2 : (m.frac < 1.0 ? 0 : 1));
        if (regular) {
          d1 = weighted(nodes, detail::fd_weights(0.0, xs, 1));
        } else {
          // One short arm: extend the stencil two regular steps the other way.
          bool matched = false;
          if (short_side == 0 || short_side == 1) {
            const int dir = short_side == 0 ? 1 : -1;
            const Arm& far = short_side == 0 ? p : m;
            const Arm& near = short_side == 0 ? m : p;
            const int q2 = line_node(id, a, 2 * dir);
            if (far.frac == 1.0 && q2 >= 0) {
              const std::array<int, 4> n4{near.node, id, far.node, q2};
              const std::array<double, 4> x4{-dir * near.frac * h, 0.0, dir * h, 2.0 * dir * h};
              d1 = weighted(n4, detail::matched_first_derivative(x4, h));
              matched = true;
            }
          }
          if (!matched) d1 = weighted(nodes, detail::fd_weights(0.0, xs, 1));
        }
        // Flux derivative: only interior nodes at regular spacing.
        if (is_interior(id) && regular && is_interior(m.node) && is_interior(p.node)) {
          flux = d1;
        } else if (is_interior(id)) {
          for (int dir : {1, -1}) {
            const Arm& a1 = dir == 1 ? p : m;
            const int q2 = line_node(id, a, 2 * dir);
            if (a1.frac == 1.0 && is_interior(a1.node) && is_interior(q2)) {
              const std::array<int, 3> n3{id, a1.node, q2};
              const std::array<double, 3> x3{0.0, dir * h, 2.0 * dir * h};
              flux = weighted(n3, detail::fd_weights(0.0, x3, 1));
              break;
            }
          }
          if (flux.empty()) flux = d1;
        } else {
          flux = d1;
        }
      } else {
        // Rectangle or interval edge: one-sided along the normal.
        const int dir = m.node < 0 ? 1 : -1;
        std::array<int, 4> n4{};
        std::array<double, 4> x4{};
        for (int k = 0; k < 4; ++k) {
          n4[k] = line_node(id, a, dir * k);
          x4[k] = dir * k * h;
        }
        d1 = weighted(std::span(n4).first(3), detail::fd_weights(0.0, std::span(x4).first(3), 1));
        d2 = weighted(n4, detail::fd_weights(0.0, x4, 2));
        flux = d1;
      }
      rows_of(d1_kind(a))[id] = std::move(d1);
      rows_of(d2_kind(a))[id] = std::move(d2);
      rows_of(flux_kind(a))[id] = std::move(flux);
    }
  }

  if (dim() == 2) {
    const double hxy = spacing_[0] * spacing_[1];
    const Point c = spec_.center;
    for (std::size_t uid = 0; uid < n; ++uid) {
      const int id = static_cast<int>(uid);
      if (!has_own_stencil(id)) continue;
      const auto [i, j] = grid_index_[id];
      Row centred;
      Row pos;
      Row neg;
      if (!is_interior(id)) {
        // Edge node: compose the first-derivative stencils.
        for (const auto& t : rows_of(StencilKind::d1_y)[id])
          add_scaled(centred, rows_of(StencilKind::d1_x)[t.node], t.weight);
        centred = merged(std::move(centred));
        pos = neg = centred;
      } else {
        const int e = grid_node(i + 1, j), w = grid_node(i - 1, j);
        const int nn = grid_node(i, j + 1), s = grid_node(i, j - 1);
        const int ne = grid_node(i + 1, j + 1), nw = grid_node(i - 1, j + 1);
        const int se = grid_node(i + 1, j - 1), sw = grid_node(i - 1, j - 1);
        bool regular = true;
        for (int a = 0; a < 2; ++a)
          for (int side = 0; side < 2; ++side) regular = regular && arms_[id][a][side].frac == 1.0;
        const bool diag_pos = ne >= 0 && sw >= 0;
        const bool diag_neg = nw >= 0 && se >= 0;

        auto quadrant = [&](int s1, int s2) -> Row {
          const int a = grid_node(i + s1, j), b = grid_node(i, j + s2), d = grid_node(i + s1, j + s2);
          if (a < 0 || b < 0 || d < 0) return {};
          const double f = s1 * s2 / hxy;
          return {{d, f}, {a, -f}, {b, -f}, {id, f}};
        };
        // Quadrant pointing towards the disc centre always lies inside.
        const Point x = positions_[id];
        const int cs1 = x[0] > c[0] ? -1 : 1;
        const int cs2 = x[1] > c[1] ? -1 : 1;
        auto best_quadrant = [&](int sign) -> Row {
          if (sign == 0 || cs1 * cs2 == sign) {
            Row q = quadrant(cs1, cs2);
            if (!q.empty()) return q;
          }
          for (int s1 : {1, -1})
            for (int s2 : {1, -1}) {
              if (sign != 0 && s1 * s2 != sign) continue;
              Row q = quadrant(s1, s2);
              if (!q.empty()) return q;
            }
          return quadrant(cs1, cs2);
        };

        if (regular && diag_pos && diag_neg) {
          const double f = 0.25 / hxy;
          centred = {{ne, f}, {sw, f}, {nw, -f}, {se, -f}};
        } else {
          centred = best_quadrant(0);
        }
        if (regular && diag_pos) {
          const double f = 0.5 / hxy;
          pos = {{id, 2.0 * f}, {ne, f}, {sw, f}, {e, -f}, {w, -f}, {nn, -f}, {s, -f}};
        } else {
          pos = best_quadrant(1);
        }
        if (regular && diag_neg) {
          const double f = -0.5 / hxy;
          neg = {{id, 2.0 * f}, {se, f}, {nw, f}, {e, -f}, {w, -f}, {nn, -f}, {s, -f}};
        } else {
          neg = best_quadrant(-1);
        }
        if (centred.empty() || pos.empty() || neg.empty())
          throw std::logic_error("domain: no admissible mixed-derivative stencil");
      }
      rows_of(StencilKind::d2_xy)[id] = std::move(centred);
      rows_of(StencilKind::d2_xy_pos)[id] = std::move(pos);
      rows_of(StencilKind::d2_xy_neg)[id] = std::move(neg);
    }
  }

  // Curved-boundary nodes reuse their owner's rows.
  for (std::size_t uid = 0; uid < n; ++uid)
    if (owner_[uid] != static_cast<int>(uid))
      for (auto& r : rows) r[uid] = r[owner_[uid]];

  for (std::size_t k = 0; k < kStencilKinds; ++k) {
    StencilTable table(n);
    for (std::size_t id = 0; id < n; ++id) {
      table.offsets_[id + 1] = table.offsets_[id] + rows[k][id].size();
      table.terms_.insert(table.terms_.end(), rows[k][id].begin(), rows[k][id].end());
    }
    stencils_[k] = std::move(table);
  }
}

bool Domain::interpolation_weights(const Point& x, std::vector<StencilTerm>& out) const {
  out.clear();
  const Point lower = spec_.shape == Shape::disc
                          ? Point{spec_.center[0] - spec_.radius, spec_.center[1] - spec_.radius}
                          : spec_.lower;
  auto cell = [&](int axis, int count, double& t) {
    const double s = (x[axis] - lower[axis]) / spacing_[axis];
    int k = static_cast<int>(std::floor(s));
    k = std::clamp(k, 0, count - 2);
    t = s - k;
    return k;
  };
  double tx = 0.0;
  const int i = cell(0, nx_, tx);
  if (dim() == 1) {
    const int a = grid_node(i, 0), b = grid_node(i + 1, 0);
    if (a < 0 || b < 0) return false;
    out = {{a, 1.0 - tx}, {b, tx}};
    return true;
  }
  double ty = 0.0;
  const int j = cell(1, ny_, ty);
  const int n00 = grid_node(i, j), n10 = grid_node(i + 1, j);
  const int n01 = grid_node(i, j + 1), n11 = grid_node(i + 1, j + 1);
  if (n00 < 0 || n10 < 0 || n01 < 0 || n11 < 0) return false;
  out = {{n00, (1 - tx) * (1 - ty)}, {n10, tx * (1 - ty)}, {n01, (1 - tx) * ty}, {n11, tx * ty}};
  return true;
}

DomainPtr build_domain(const DomainSpec& spec) {
  const int d = spec.dim();
  for (int a = 0; a < d; ++a)
    if (spec.nodes[a] < kMinNodes)
      throw std::invalid_argument("build_domain: resolution must be at least 9 nodes per axis");
  if (spec.shape == Shape::disc) {
    if (!(spec.radius > 0.0)) throw std::invalid_argument("build_domain: disc radius must be positive");
    if (spec.nodes[0] != spec.nodes[1] || spec.nodes[0] % 2 == 0)
      throw std::invalid_argument("build_domain: disc grids need the same odd node count on both axes");
  } else {
    for (int a = 0; a < d; ++a)
      if (!(spec.upper[a] > spec.lower[a]))
        throw std::invalid_argument("build_domain: extent must be positive on every axis");
  }
  auto domain = std::shared_ptr<Domain>(new Domain());
  domain->spec_ = spec;
  if (d == 1) domain->spec_.nodes[1] = 1;
  domain->classify_nodes();
  if (spec.shape == Shape::disc && !(spec.radius > 2.0 * domain->spacing_[0]))
    throw std::invalid_argument("build_domain: disc radius must exceed two grid spacings");
  domain->build_arms();
  domain->build_weights();
  domain->build_stencils();
  return domain;
}

}  // namespace pmc
