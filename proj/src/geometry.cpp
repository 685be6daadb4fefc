#include "pmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmc {

double CoeffMatrix::quadratic_form(std::span<const double> xi) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += a[i][j] * xi[i] * xi[j];
  return s;
}

CoeffMatrix coeff_matrix(std::span<const double> z) {
  const int n = static_cast<int>(z.size());
  if (n < 1 || n > 2) throw std::invalid_argument("coeff_matrix: slope must have 1 or 2 components");
  double z2 = 0.0;
  for (double zi : z) {
    if (!std::isfinite(zi)) throw std::invalid_argument("coeff_matrix: non-finite slope");
    z2 += zi * zi;
  }
  const double w2 = 1.0 + z2;
  const double inv_w = 1.0 / std::sqrt(w2);
  CoeffMatrix c;
  c.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c.a[i][j] = inv_w * ((i == j ? 1.0 : 0.0) - z[i] * z[j] / w2);
      c.Lambda = std::max(c.Lambda, std::abs(c.a[i][j]));
    }
  c.lambda = inv_w / w2;
  return c;
}

std::vector<double> unit_normal(std::span<const double> z) {
  double z2 = 0.0;
  for (double zi : z) z2 += zi * zi;
  const double inv_w = 1.0 / std::sqrt(1.0 + z2);
  std::vector<double> nu(z.size() + 1);
  for (std::size_t i = 0; i < z.size(); ++i) nu[i] = z[i] * inv_w;
  nu.back() = -inv_w;
  return nu;
}

namespace {

// Compact conservative form at a node whose 3x3 grid neighbourhood exists:
// fluxes at edge midpoints, tangential slope averaged over the four nodes
// around each midpoint. Returns false when a neighbour is missing.
bool staggered_div(const Domain& d, const GridField& u, int id, double& out) {
  const auto [i, j] = d.grid_index(id);
  if (i < 0) return false;
  const double hx = d.spacing()[0];
  if (d.dim() == 1) {
    const int w = d.grid_node(i - 1, 0), e = d.grid_node(i + 1, 0);
    if (w < 0 || e < 0) return false;
    auto flux = [&](int a, int b) {
      const double s = (u[b] - u[a]) / hx;
      return s / std::sqrt(1.0 + s * s);
    };
    out = (flux(id, e) - flux(w, id)) / hx;
    return true;
  }
  const double hy = d.spacing()[1];
  int g[3][3];
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      g[a + 1][b + 1] = d.grid_node(i + a, j + b);
      if (g[a + 1][b + 1] < 0) return false;
    }
  for (int axis = 0; axis < 2; ++axis)
    for (int side = 0; side < 2; ++side)
      if (d.arm(id, axis, side).frac != 1.0) return false;
  auto U = [&](int a, int b) { return u[g[a + 1][b + 1]]; };
  auto fx = [&](int a) {  // midpoint between columns a and a + 1 on row 0
    const double sx = (U(a + 1, 0) - U(a, 0)) / hx;
    const double sy = (U(a, 1) + U(a + 1, 1) - U(a, -1) - U(a + 1, -1)) / (4.0 * hy);
    return sx / std::sqrt(1.0 + sx * sx + sy * sy);
  };
  auto fy = [&](int b) {
    const double sy = (U(0, b + 1) - U(0, b)) / hy;
    const double sx = (U(1, b) + U(1, b + 1) - U(-1, b) - U(-1, b + 1)) / (4.0 * hx);
    return sy / std::sqrt(1.0 + sx * sx + sy * sy);
  };
  out = (fx(0) - fx(-1)) / hx + (fy(0) - fy(-1)) / hy;
  return true;
}

}  // namespace

GridField mean_curvature_div(const GridField& u) {
  const Domain& d = u.domain();
  const int n = d.dim();
  const auto g = gradient(u);
  std::vector<GridField> flux;
  for (int a = 0; a < n; ++a) flux.emplace_back(u.domain_ptr());
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    const int id = static_cast<int>(k);
    double s = 1.0;
    for (int a = 0; a < n; ++a) s += g[a][id] * g[a][id];
    const double inv_w = 1.0 / std::sqrt(s);
    for (int a = 0; a < n; ++a) flux[a][id] = g[a][id] * inv_w;
  }
  GridField out(u.domain_ptr(), "mean_curvature_div");
  for (int id : d.interior()) {
    double div = 0.0;
    if (!staggered_div(d, u, id, div))
      for (int a = 0; a < n; ++a) div += d.stencil(flux_kind(a)).apply(id, flux[a].values());
    out[id] = div;
  }
  return out;
}

GridField mean_curvature_nondiv(const GridField& u) {
  const Domain& d = u.domain();
  const int n = d.dim();
  const auto g = gradient(u);
  const HessianField hs = hessian(u);
  GridField out(u.domain_ptr(), "mean_curvature_nondiv");
  for (int id : d.interior()) {
    std::array<double, 2> z{};
    for (int a = 0; a < n; ++a) z[a] = g[a][id];
    const CoeffMatrix c = coeff_matrix(std::span(z).first(n));
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += c(i, j) * hs(i, j)[id];
    out[id] = s;
  }
  return out;
}

std::array<double, 2> b_coefficients(std::span<const double> grad_v, std::span<const double> grad_h,
                                     const std::array<std::array<double, 2>, 2>& hess_h, int dim) {
  double p2 = 0.0;
  double trace = 0.0;
  std::array<double, 2> shift{};
  for (int a = 0; a < dim; ++a) {
    const double p = grad_v[a] + grad_h[a];
    p2 += p * p;
    trace += hess_h[a][a];
    shift[a] = grad_v[a] + 2.0 * grad_h[a];
  }
  const double kappa = std::pow(1.0 + p2, -1.5);
  std::array<double, 2> b{};
  for (int i = 0; i < dim; ++i) {
    double s = trace * shift[i];
    for (int j = 0; j < dim; ++j) s -= hess_h[i][j] * shift[j];
    b[i] = kappa * s;
  }
  return b;
}

GridField b_term(const GridField& v, const GridField& h, const GridField& w) {
  if (v.domain_ptr() != h.domain_ptr() || v.domain_ptr() != w.domain_ptr())
    throw std::invalid_argument("b_term: fields live on different domains");
  const Domain& d = v.domain();
  const int n = d.dim();
  const auto gv = gradient(v);
  const auto gh = gradient(h);
  const auto gw = gradient(w);
  const HessianField hh = hessian(h);
  GridField out(v.domain_ptr(), "b_term");
  for (int id : d.interior()) {
    std::array<double, 2> zv{}, zh{};
    std::array<std::array<double, 2>, 2> hess{};
    for (int i = 0; i < n; ++i) {
      zv[i] = gv[i][id];
      zh[i] = gh[i][id];
      for (int j = 0; j < n; ++j) hess[i][j] = hh(i, j)[id];
    }
    const auto b = b_coefficients(zv, zh, hess, n);
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += b[a] * gw[a][id];
    out[id] = s;
  }
  return out;
}

EllipticityBounds ellipticity_bounds(const GridField& u) {
  const Domain& d = u.domain();
  const int n = d.dim();
  const auto g = gradient(u);
  EllipticityBounds e{1.0, 0.0};
  for (int id : d.interior()) {
    std::array<double, 2> z{};
    for (int a = 0; a < n; ++a) z[a] = g[a][id];
    const CoeffMatrix c = coeff_matrix(std::span(z).first(n));
    e.lambda_min = std::min(e.lambda_min, c.lambda);
    e.Lambda_max = std::max(e.Lambda_max, c.Lambda);
  }
  return e;
}

}  // namespace pmc
