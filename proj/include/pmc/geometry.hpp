#pragma once

#include "pmc/grid_field.hpp"

#include <array>
#include <span>
#include <vector>

namespace pmc {

/// Coefficients of the linearised mean-curvature operator frozen at a slope z:
///
///   A_ij(z) = (delta_ij - z_i z_j / (1 + |z|^2)) / sqrt(1 + |z|^2)
///
/// together with its ellipticity constant lambda = (1 + |z|^2)^(-3/2) and the
/// entry bound Lambda = max |A_ij|.
struct CoeffMatrix {
  int dim = 0;
  std::array<std::array<double, 2>, 2> a{};
  double lambda = 0.0;
  double Lambda = 0.0;

  double operator()(int i, int j) const { return a[i][j]; }
  /// xi^T A xi.
  double quadratic_form(std::span<const double> xi) const;
};

/// Throws std::invalid_argument for non-finite slopes or n outside {1, 2}.
CoeffMatrix coeff_matrix(std::span<const double> z);

/// (z, -1) / sqrt(1 + |z|^2); n + 1 components.
std::vector<double> unit_normal(std::span<const double> z);

/// div(grad u / sqrt(1 + |grad u|^2)) in conservative form: fluxes at edge
/// midpoints with the tangential slope averaged over the four surrounding
/// nodes. Next to a curved boundary, where that neighbourhood leaves the grid,
/// nodal fluxes are differentiated instead. Interior nodes only; boundary
/// entries are zero.
GridField mean_curvature_div(const GridField& u);

/// A_ij(grad u) u_{x_i x_j} from the nodal Hessian. Interior nodes only.
GridField mean_curvature_nondiv(const GridField& u);

/// First-order coefficient vector of the perturbation equation around a
/// minimal graph h, evaluated from pointwise data:
///
///   B = (1 + |p|^2)^(-3/2) (tr(D^2 h) I - D^2 h)(grad v + 2 grad h),  p = grad v + grad h,
///
/// so that B . grad w equals the h-Hessian term of the perturbation form.
std::array<double, 2> b_coefficients(std::span<const double> grad_v, std::span<const double> grad_h,
                                     const std::array<std::array<double, 2>, 2>& hess_h, int dim);

/// Pointwise B(grad v) . grad w on interior nodes (zero on the boundary).
GridField b_term(const GridField& v, const GridField& h, const GridField& w);

/// Smallest ellipticity constant and largest coefficient entry of A(grad u)
/// over interior nodes.
struct EllipticityBounds {
  double lambda_min = 0.0;
  double Lambda_max = 0.0;
};
EllipticityBounds ellipticity_bounds(const GridField& u);

}  // namespace pmc
