#pragma once

#include "pmc/linear_elliptic.hpp"
#include "pmc/norms.hpp"
#include "pmc/prescription.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmc {

/// Precedence when several apply: diverged, trust_violation, max_iters,
/// converged.
enum class SolveStatus { converged, diverged, max_iters, trust_violation };

std::string to_string(SolveStatus s);

struct IterationRecord {
  int k = 0;
  double update_norm = 0.0;       // ||dv||_inf / diam + max |grad dv|
  double residual_div = 0.0;      // scaled max |div(grad u / W) - H|
  double residual_nondiv = 0.0;   // scaled max |L[v] v - H| with the assembly stencils
  double trust_norm = 0.0;        // ||v_k||_{C^{1,beta}}
  double w2q_distance = 0.0;      // ||v_k||_{W^{2,q}}
  int linear_iterations = 0;
};

struct IterationConfig {
  double damping = 1.0;  // theta in (0, 1]
  int max_iters = 200;
  /// Convergence threshold on update_norm.
  double tol = 1e-8;
  /// Radius of the admissible set, compared against ||v_k||_{C^{1,beta}}.
  double trust_radius = 1.0;
  SobolevParams params;
  double divergence_factor = 10.0;
  double linear_tol = 1e-12;
  AssemblyOptions assembly;
  /// Per-iteration CSV dumps (iter_00001.csv, ...) when non-empty.
  std::string dump_dir;
  std::function<void(const IterationRecord&)> on_iteration;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SolveReport {
  std::vector<IterationRecord> iterations;
  SolveStatus status = SolveStatus::max_iters;
  /// update_norm reached tol, whatever the trust-region outcome.
  bool update_converged = false;
  /// ||G||_{W^{1,p}(Omega x R)} + ||phi||_{W^{2,q}}; infinite when G has no
  /// finite slab norm.
  double smallness = 0.0;
  double slab_norm = 0.0;
  double phi_w2q = 0.0;
  bool has_base = false;
  std::string prescription;
  bool within_hypotheses = true;
  std::string note;
  /// Largest |H| on the final iterate; scales the residual check.
  double h_scale = 0.0;
  /// residual_div <= 10 tol (1 + h_scale) on the final iterate.
  bool residual_check = false;
  /// max over iterates of trust_norm.
  double max_trust_norm = 0.0;
  double final_w2q_distance = 0.0;
  std::optional<LinearSolveReport> last_linear;
  /// Reason for diverged status (non-finite update, degenerate coefficients).
  std::string message;
};

/// Linear-solve failure inside the iteration, with the report up to the
/// failing step.
class IterationAborted : public LinearSolveError {
 public:
  IterationAborted(const std::string& what, SolveReport partial)
      : LinearSolveError(what), report(std::move(partial)) {}
  SolveReport report;
};

/// H(x, v + h, grad v + grad h) on every node.
GridField curvature_rhs(const Prescription& P, const GridField& v, const GridField* h);

/// One application of the fixed-point map: the solution w of the linear
/// problem with coefficients frozen at v (+ h) and right-hand side
/// H(x, v + h, grad v + grad h), w = phi on the boundary.
LinearSolution apply_T(const GridField& v, const GridField* h, const Prescription& P, const GridField& phi,
                       const LinearSolveOptions& opt = {}, const AssemblyOptions& assembly = {});

/// Residuals of u = v + h, scaled by min_spacing^2 / diam so they compare with
/// update_norm. `div` uses the flux discretisation, `nondiv` the assembly rows.
struct Residuals {
  double div = 0.0;
  double nondiv = 0.0;
  double h_scale = 0.0;
};
Residuals residuals(const GridField& v, const GridField* h, const Prescription& P,
                    const AssemblyOptions& assembly = {});

struct PmcSolution {
  GridField u;  // v + h
  GridField v;  // perturbation (u itself without a base)
  SolveReport report;
};

/// Damped Picard iteration v <- (1 - theta) v + theta T(v). Starts from phi
/// without a base and from 0 (boundary values phi) with one, unless `start`
/// is given. Throws IterationAborted when a linear solve fails.
PmcSolution solve_pmc(const GridField* h, const Prescription& P, const GridField& phi, const IterationConfig& cfg,
                      const std::optional<GridField>& start = std::nullopt);

struct SweepEntry {
  double s = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  double w2q_distance = 0.0;
  int iterations = 0;
  bool warm_started = false;
  SolveReport report;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  /// Largest s with status converged, if any.
  std::optional<double> max_converged_s;
  std::optional<GridField> last_converged;
};

/// Runs solve_pmc for each s in increasing order, warm-starting from the last
/// converged perturbation. Linear-solve failures are recorded as diverged.
/// Throws std::invalid_argument unless s_values is strictly increasing.
SweepReport continuation_sweep(const GridField* h, const std::function<Prescription(double)>& family,
                               const GridField& phi, const IterationConfig& cfg, const std::vector<double>& s_values,
                               bool warm_start = true);

}  // namespace pmc
