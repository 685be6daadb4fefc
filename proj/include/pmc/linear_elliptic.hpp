#pragma once

#include "pmc/geometry.hpp"
#include "pmc/grid_field.hpp"

#include <Eigen/SparseCore>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmc {

struct AssemblyOptions {
  /// Replace central first-order differences by one-sided upwind ones at
  /// nodes where |B_a| h / (2 A_aa) > 1.
  bool upwind = false;
};

/// Discrete Dirichlet problem A_ij w_ij + B . grad w = f on interior nodes,
/// w = phi on boundary nodes (eliminated into the right-hand side).
struct LinearSystem {
  DomainPtr domain;
  Eigen::SparseMatrix<double> matrix;  // interior x interior
  Eigen::VectorXd rhs;
  GridField f;
  GridField phi;
  std::vector<double> det_root;  // det(A)^(1/n) by node id, interior only
  double lambda_min = 0.0;
  double Lambda_max = 0.0;
  /// Some row has a non-negative diagonal or a negative off-diagonal entry
  /// (boundary columns included), so the discrete maximum principle is not
  /// guaranteed.
  bool diag_dominance_violation = false;
  bool has_b_term = false;
  int upwinded_nodes = 0;
  int bandwidth = 0;
};

/// Operator row of one interior node in terms of node ids (boundary nodes
/// included). The mixed term uses the seven-point stencil whose diagonal
/// matches the sign of A_12.
std::vector<StencilTerm> operator_row(const Domain& d, int node, const CoeffMatrix& a,
                                      const std::array<double, 2>& b, bool upwind);

/// Per-node coefficients A(grad v [+ grad h]) and B (zero without h).
struct OperatorCoefficients {
  std::vector<CoeffMatrix> a;            // indexed by node id, interior only
  std::vector<std::array<double, 2>> b;  // indexed by node id, interior only
  double lambda_min = 1.0;
  double Lambda_max = 0.0;
  bool has_b_term = false;
};
/// Throws std::domain_error on non-finite coefficients or lambda_min < 1e-12.
OperatorCoefficients operator_coefficients(const GridField& v, const GridField* h);

/// Applies the assembled operator (coefficients frozen at v [+ h]) to w on
/// interior nodes; boundary entries are zero.
GridField apply_operator(const OperatorCoefficients& c, const GridField& w, const AssemblyOptions& opt = {});

/// Throws std::invalid_argument if the fields live on different domains and
/// std::domain_error for degenerate or non-finite coefficients.
LinearSystem assemble(const GridField& v, const GridField* h, const GridField& f, const GridField& phi,
                      const AssemblyOptions& opt = {});

enum class SolveMethod { automatic, direct, iterative };

struct LinearSolveOptions {
  double tol = 1e-10;
  SolveMethod method = SolveMethod::automatic;
  /// Starting guess for the iterative solver (whole field; interior used).
  std::optional<GridField> initial_guess;
  /// Exponent of the W^{2,q} estimate ratio.
  double q = 4.0;
};

struct LinearSolveReport {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  // relative, ||A x - b|| / ||b||
  double aleksandrov_lhs = 0.0;       // ||w||_inf
  double aleksandrov_rhs = 0.0;       // sup|phi| + d / (n omega_n^(1/n)) ||f / det(A)^(1/n)||_{L^n}
  double aleksandrov_constant = 0.0;  // C making lhs = sup|phi| + C d ||f / det(A)^(1/n)||_{L^n}
  double estimate_ratio = 0.0;        // ||w||_{W^{2,q}} / (||f||_{L^q} + ||phi||_{W^{2,q}})
  bool diag_dominance_violation = false;
  double lambda_min = 0.0;
  double Lambda_max = 0.0;
};

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSolution {
  GridField w;
  LinearSolveReport report;
};

/// Sparse LU when the bandwidth is at most 10^4, otherwise BiCGSTAB with an
/// incomplete LU preconditioner. Throws LinearSolveError when the iteration
/// reduces the residual by less than 10x over 200 iterations, or when the
/// final residual exceeds tol.
LinearSolution solve(const LinearSystem& sys, const LinearSolveOptions& opt = {});

/// Coordinate dump: a comment line, then `row col value` per entry (0-based
/// interior indices, %.17g values).
void write_coo(const LinearSystem& sys, const std::string& path);

}  // namespace pmc
