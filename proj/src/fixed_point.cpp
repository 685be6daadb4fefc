#include "pmc/fixed_point.hpp"

#include "pmc/geometry.hpp"
#include "pmc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

namespace pmc {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::trust_violation: return "trust_violation";
  }
  return "unknown";
}

void IterationConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("iteration.damping must lie in (0, 1]");
  if (max_iters < 1) throw std::invalid_argument("iteration.max_iters must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("iteration.tol must be positive");
  if (!(trust_radius > 0.0)) throw std::invalid_argument("iteration.trust_radius must be positive");
  if (!(divergence_factor > 1.0)) throw std::invalid_argument("iteration.divergence_factor must exceed 1");
  if (!(linear_tol > 0.0)) throw std::invalid_argument("iteration.linear_tol must be positive");
}

GridField curvature_rhs(const Prescription& P, const GridField& v, const GridField* h) {
  const Domain& d = v.domain();
  if (P.n != d.dim()) throw std::invalid_argument("prescription dimension does not match the domain");
  const int n = d.dim();
  GridField u = h ? v + *h : v;
  const auto g = gradient(u);
  GridField out(v.domain_ptr(), "H");
  std::array<double, 2> z{};
  for (std::size_t id = 0; id < d.node_count(); ++id) {
    const int node = static_cast<int>(id);
    for (int i = 0; i < n; ++i) z[i] = g[i][node];
    out[node] = P.H(d.position(node), u[node], std::span<const double>(z.data(), static_cast<std::size_t>(n)));
  }
  return out;
}

LinearSolution apply_T(const GridField& v, const GridField* h, const Prescription& P, const GridField& phi,
                       const LinearSolveOptions& opt, const AssemblyOptions& assembly) {
  if (v.domain_ptr() != phi.domain_ptr()) throw std::invalid_argument("apply_T: v and phi live on different domains");
  v.require_finite("apply_T");
  const GridField f = curvature_rhs(P, v, h);
  const LinearSystem sys = assemble(v, h, f, phi, assembly);
  return solve(sys, opt);
}

namespace {

double scale_factor(const Domain& d) { return d.min_spacing() * d.min_spacing() / d.diameter(); }

double interior_max(const GridField& r) {
  double m = 0.0;
  for (int id : r.domain().interior()) m = std::max(m, std::abs(r[id]));
  return m;
}

double update_norm(const GridField& delta) {
  double g = 0.0;
  for (const auto& c : gradient(delta))
    for (double x : c.values()) g = std::max(g, std::abs(x));
  return linf_norm(delta) / delta.domain().diameter() + g;
}

void pin_boundary(GridField& v, const GridField& phi) {
  for (int id : v.domain().boundary()) v[id] = phi[id];
}

std::string dump_name(const std::string& dir, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%05d.csv", k);
  return (std::filesystem::path(dir) / buf).string();
}

}  // namespace

Residuals residuals(const GridField& v, const GridField* h, const Prescription& P, const AssemblyOptions& assembly) {
  const GridField H = curvature_rhs(P, v, h);
  const GridField u = h ? v + *h : v;
  const double s = scale_factor(v.domain());
  Residuals r;
  r.h_scale = interior_max(H);
  r.div = s * interior_max(mean_curvature_div(u) - H);
  r.nondiv = s * interior_max(apply_operator(operator_coefficients(v, h), v, assembly) - H);
  return r;
}

PmcSolution solve_pmc(const GridField* h, const Prescription& P, const GridField& phi, const IterationConfig& cfg,
                      const std::optional<GridField>& start) {
  cfg.validate();
  const DomainPtr dom = phi.domain_ptr();
  if (h && h->domain_ptr() != dom) throw std::invalid_argument("solve_pmc: base graph and phi live on different domains");
  if (start && start->domain_ptr() != dom) throw std::invalid_argument("solve_pmc: start field lives on another domain");
  if (P.n != dom->dim()) throw std::invalid_argument("solve_pmc: prescription dimension does not match the domain");
  phi.require_finite("solve_pmc");

  SolveReport rep;
  rep.has_base = h != nullptr;
  rep.prescription = P.name;
  rep.within_hypotheses = P.within_hypotheses;
  rep.note = P.note;
  rep.phi_w2q = w2q_norm(phi, cfg.params.q);
  try {
    rep.slab_norm = slab_w1p_norm(P.G, *dom, cfg.params);
  } catch (const std::runtime_error&) {
    rep.slab_norm = std::numeric_limits<double>::infinity();
  }
  rep.smallness = rep.slab_norm + rep.phi_w2q;

  GridField v = start ? *start : (h ? GridField(dom, "v") : phi);
  v.set_name("v");
  pin_boundary(v, phi);

  LinearSolveOptions lin;
  lin.tol = cfg.linear_tol;
  lin.q = cfg.params.q;
  double running_min = std::numeric_limits<double>::infinity();
  int above = 0;
  bool done = false;

  for (int k = 1; k <= cfg.max_iters && !done; ++k) {
    lin.initial_guess = v;
    LinearSolution T;
    try {
      T = apply_T(v, h, P, phi, lin, cfg.assembly);
    } catch (const std::domain_error& e) {
      rep.status = SolveStatus::diverged;
      rep.message = std::string("degenerate iterate: ") + e.what();
      break;
    } catch (const LinearSolveError& e) {
      throw IterationAborted(std::string("solve_pmc: linear solve failed at iteration ") + std::to_string(k) + ": " +
                                 e.what(),
                             rep);
    }
    GridField next = GridField::blend(v, T.w, cfg.damping);
    next.set_name("v");
    pin_boundary(next, phi);
    rep.last_linear = T.report;

    IterationRecord rec;
    rec.k = k;
    rec.linear_iterations = T.report.iterations;
    rec.update_norm = update_norm(next - v);
    if (!next.all_finite() || !std::isfinite(rec.update_norm)) {
      rep.status = SolveStatus::diverged;
      rep.message = "non-finite iterate";
      break;
    }
    v = std::move(next);
    try {
      const Residuals r = residuals(v, h, P, cfg.assembly);
      rec.residual_div = r.div;
      rec.residual_nondiv = r.nondiv;
      rep.h_scale = r.h_scale;
    } catch (const std::domain_error& e) {
      rep.status = SolveStatus::diverged;
      rep.message = std::string("degenerate iterate: ") + e.what();
      done = true;
    }
    rec.trust_norm = holder_c1beta(v, cfg.params.beta);
    rec.w2q_distance = w2q_norm(v, cfg.params.q);
    rep.max_trust_norm = std::max(rep.max_trust_norm, rec.trust_norm);
    rep.iterations.push_back(rec);
    if (cfg.on_iteration) cfg.on_iteration(rec);
    if (!cfg.dump_dir.empty()) write_csv(v, dump_name(cfg.dump_dir, k));
    if (done) break;

    if (rec.update_norm <= cfg.tol) {
      rep.status = SolveStatus::converged;
      rep.update_converged = true;
      break;
    }
    if (rec.update_norm > cfg.divergence_factor * running_min) {
      if (++above >= 5) {
        rep.status = SolveStatus::diverged;
        rep.message = "update norm exceeded " + format_double(cfg.divergence_factor) +
                      " x its running minimum for 5 consecutive steps";
        break;
      }
    } else {
      above = 0;
    }
    running_min = std::min(running_min, rec.update_norm);
  }

  if (!rep.iterations.empty()) {
    const IterationRecord& last = rep.iterations.back();
    rep.final_w2q_distance = last.w2q_distance;
    rep.residual_check = last.residual_div <= 10.0 * cfg.tol * (1.0 + rep.h_scale);
  }
  if (rep.status != SolveStatus::diverged && rep.max_trust_norm > cfg.trust_radius)
    rep.status = SolveStatus::trust_violation;

  GridField u = h ? v + *h : v;
  u.set_name("u");
  return {std::move(u), std::move(v), std::move(rep)};
}

SweepReport continuation_sweep(const GridField* h, const std::function<Prescription(double)>& family,
                               const GridField& phi, const IterationConfig& cfg, const std::vector<double>& s_values,
                               bool warm_start) {
  for (std::size_t i = 1; i < s_values.size(); ++i)
    if (!(s_values[i] > s_values[i - 1]))
      throw std::invalid_argument("continuation_sweep: s values must be strictly increasing");
  SweepReport out;
  for (double s : s_values) {
    SweepEntry e;
    e.s = s;
    e.warm_started = warm_start && out.last_converged.has_value();
    try {
      const Prescription P = family(s);
      PmcSolution sol = solve_pmc(h, P, phi, cfg, e.warm_started ? out.last_converged : std::nullopt);
      e.report = std::move(sol.report);
      if (e.report.status == SolveStatus::converged) {
        out.max_converged_s = s;
        out.last_converged = std::move(sol.v);
      }
    } catch (const IterationAborted& err) {
      e.report = err.report;
      e.report.status = SolveStatus::diverged;
      e.report.message = err.what();
    }
    e.status = e.report.status;
    e.w2q_distance = e.report.final_w2q_distance;
    e.iterations = static_cast<int>(e.report.iterations.size());
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace pmc
