#include "pmc/verify.hpp"

#include "pmc/exact.hpp"
#include "pmc/fixed_point.hpp"
#include "pmc/geometry.hpp"
#include "pmc/io_util.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pmc {

namespace {

using Checks = std::vector<CheckResult>;

void add(Checks& out, const std::string& suite, const std::string& name, bool ok, const std::string& detail) {
  out.push_back({suite, name, ok, detail});
}

std::string kv(const std::string& k, double v) { return k + "=" + format_double(v); }

double interior_max(const GridField& r) {
  double m = 0.0;
  for (int id : r.domain().interior()) m = std::max(m, std::abs(r[id]));
  return m;
}

void geometry_suite(std::uint64_t seed, Checks& out) {
  const std::string S = "geometry";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, worst_norm = 0.0;
  for (int k = 0; k < 10000; ++k) {
    std::array<double, 2> z{u(rng), u(rng)};
    const double scale = 10.0 * std::abs(u(rng)) / std::max(1e-300, std::hypot(z[0], z[1]));
    z = {z[0] * scale, z[1] * scale};
    const std::array<double, 2> xi{u(rng), u(rng)};
    const CoeffMatrix a = coeff_matrix(z);
    const double lam = std::pow(1.0 + z[0] * z[0] + z[1] * z[1], -1.5);
    worst = std::max(worst, lam * (xi[0] * xi[0] + xi[1] * xi[1]) - a.quadratic_form(xi));
    const auto nu = unit_normal(z);
    worst_norm = std::max(worst_norm, std::abs(std::hypot(nu[0], nu[1], nu[2]) - 1.0));
  }
  add(out, S, "ellipticity_10k", worst <= 1e-12, kv("max_violation", worst));
  add(out, S, "unit_normal_length", worst_norm <= 1e-14, kv("max_defect", worst_norm));

  double e[2];
  int i = 0;
  for (int n : {33, 65}) {
    auto d = build_domain(DomainSpec::square(-1.2, 1.2, n));
    e[i++] = interior_max(mean_curvature_div(GridField::from_function(d, scherk_height)));
  }
  add(out, S, "scherk_second_order", e[0] / e[1] >= 3.3 && e[0] / e[1] <= 4.7, kv("ratio", e[0] / e[1]));

  auto d = build_domain(DomainSpec::square(-1.0, 1.0, 17));
  const auto h = GridField::from_function(d, scherk_height);
  const auto v = GridField::from_function(d, random_smooth_function(seed, 0));
  const auto lhs = mean_curvature_nondiv(v + h);
  const auto A = operator_coefficients(v, &h);
  const auto mh = mean_curvature_nondiv(h);
  const auto gv = gradient(v), gh = gradient(h);
  const auto hv = hessian(v);
  double defect = 0.0;
  for (int id : d->interior()) {
    double s = 0.0, ph2 = 0.0, p2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) s += A.a[id](a, b) * hv(a, b)[id];
      s += A.b[id][a] * gv[a][id];
      ph2 += gh[a][id] * gh[a][id];
      p2 += std::pow(gv[a][id] + gh[a][id], 2);
    }
    s += std::pow(1.0 + p2, -1.5) * std::pow(1.0 + ph2, 1.5) * mh[id];
    defect = std::max(defect, std::abs(lhs[id] - s));
  }
  add(out, S, "perturbation_identity", defect <= 1e-10, kv("max_defect", defect));
}

void norms_suite(std::uint64_t seed, Checks& out) {
  const std::string S = "norms";
  const SobolevParams p = derive_q(2, 2.0);
  add(out, S, "derive_q_example", p.q == 4.0 && p.beta == 0.25, kv("q", p.q) + " " + kv("beta", p.beta));
  bool rejected = false;
  try {
    derive_q(2, 3.5);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  add(out, S, "derive_q_range", rejected, "p = 3.5, n = 2 rejected");

  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  double hom = 0.0, tri = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto f = GridField::from_function(d, random_smooth_function(seed, k));
    const auto g = GridField::from_function(d, random_smooth_function(seed + 1, k));
    const double c = 0.5 + k;
    hom = std::max(hom, std::abs(w2q_norm(c * f, 4.0) - c * w2q_norm(f, 4.0)) / (c * w2q_norm(f, 4.0)));
    tri = std::max(tri, w1p_norm(f + g, 2.0) - w1p_norm(f, 2.0) - w1p_norm(g, 2.0));
  }
  add(out, S, "w2q_homogeneity", hom <= 1e-12, kv("max_rel_defect", hom));
  add(out, S, "w1p_triangle", tri <= 1e-12, kv("max_excess", tri));

  SlabFunction G;
  G.value = [](const Point&, double t) { return std::exp(-t * t); };
  G.grad = [](const Point&, double t) { return std::array<double, 3>{0.0, 0.0, -2.0 * t * std::exp(-t * t)}; };
  const double slab = slab_w1p_norm(G, *d, p);
  const double exact = std::pow(2.0 * std::numbers::pi, 0.25);
  add(out, S, "slab_gaussian", std::abs(slab - exact) <= 1e-8 * exact, kv("norm", slab) + " " + kv("exact", exact));

  const auto aff = GridField::from_function(d, [](const Point& x) { return 3.0 * x[0] - 4.0 * x[1]; });
  const double hs = holder_seminorm(aff, 0.5, seed);
  add(out, S, "holder_affine_zero", hs <= 1e-10, kv("seminorm", hs));
}

void linear_suite(std::uint64_t seed, Checks& out) {
  const std::string S = "linear";
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  double unique = 0.0;
  int clean = 0, mp_fail = 0, abp_fail = 0;
  for (int k = 0; k < 10; ++k) {
    auto v = GridField::from_function(d, random_smooth_function(seed, k));
    v *= 1.0 / holder_c1beta(v, 0.25, seed);
    const auto shape = random_smooth_function(seed + 1, k);
    const auto f = GridField::from_function(d, [&](const Point& x) { return shape(x) * shape(x); });
    const auto phi = GridField::from_function(d, random_smooth_function(seed + 2, k));
    for (double sign : {1.0, -1.0}) {
      const auto sys = assemble(v, nullptr, sign * f, phi);
      const auto direct = solve(sys);
      LinearSolveOptions opt;
      opt.method = SolveMethod::iterative;
      opt.tol = 1e-12;
      opt.initial_guess = GridField::from_function(d, random_smooth_function(seed + 3, k));
      const auto iter = solve(sys, opt);
      unique = std::max(unique, linf_norm(direct.w - iter.w));
      if (sys.diag_dominance_violation) continue;
      ++clean;
      double bext = -1e300, iext = -1e300;
      for (int id : d->boundary()) bext = std::max(bext, sign * direct.w[id]);
      for (int id : d->interior()) iext = std::max(iext, sign * direct.w[id]);
      if (iext > bext + 1e-10) ++mp_fail;
      if (direct.report.aleksandrov_lhs > direct.report.aleksandrov_rhs) ++abp_fail;
    }
  }
  add(out, S, "uniqueness", unique <= 1e-8, kv("max_diff", unique));
  add(out, S, "maximum_principle", clean > 0 && mp_fail == 0,
      "clean=" + std::to_string(clean) + " failures=" + std::to_string(mp_fail));
  add(out, S, "aleksandrov_bound", abp_fail == 0, "failures=" + std::to_string(abp_fail));

  double e[2];
  int i = 0;
  for (int n : {17, 33}) {
    auto dd = build_domain(DomainSpec::square(0.0, 1.0, n));
    auto exact = [](const Point& x) { return std::sin(std::numbers::pi * x[0]) * std::exp(x[1]); };
    const auto f = GridField::from_function(dd, [&](const Point& x) {
      return (1.0 - std::numbers::pi * std::numbers::pi) * exact(x);
    });
    const auto w = solve(assemble(GridField::constant(dd, 0.0), nullptr, f, GridField::from_function(dd, exact))).w;
    e[i++] = linf_norm(w - GridField::from_function(dd, exact));
  }
  add(out, S, "poisson_second_order", e[0] / e[1] >= 3.5 && e[0] / e[1] <= 4.5, kv("ratio", e[0] / e[1]));
}

void trace_suite(std::uint64_t seed, Checks& out) {
  const std::string S = "trace";
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  const SobolevParams p = derive_q(2, 2.0);
  const double norm = std::pow(2.0 * std::numbers::pi, 0.25);
  SlabFunction G;
  G.value = [norm](const Point&, double t) { return std::exp(-t * t) / norm; };
  G.grad = [norm](const Point&, double t) {
    return std::array<double, 3>{0.0, 0.0, -2.0 * t * std::exp(-t * t) / norm};
  };
  G.T = 2.0;
  G.V = 1.0;
  const RatioSweep r = trace_ratio_sweep(G, d, p, 50, seed);
  add(out, S, "ratio_bounded", r.max_ratio <= kTraceRatioBound,
      kv("max_ratio", r.max_ratio) + " " + kv("bound", kTraceRatioBound));
  double worst = -1e300;
  for (int k = 0; k < 20; ++k) {
    const auto v = random_lipschitz_field(d, 1.0, seed, k);
    const auto dens = graph_density(v, 20, seed + static_cast<std::uint64_t>(k));
    worst = std::max(worst, dens.density - (1.0 + 1.0) * std::numbers::pi);
  }
  add(out, S, "density_bound", worst <= 1e-2, kv("max_excess", worst));
}

void fixedpoint_suite(std::uint64_t seed, Checks& out) {
  const std::string S = "fixedpoint";
  (void)seed;
  {
    auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
    const auto sol = solve_pmc(nullptr, zero_prescription(2), GridField::constant(d, 0.0), IterationConfig{});
    add(out, S, "zero_data", sol.report.status == SolveStatus::converged && linf_norm(sol.u) == 0.0,
        "iterations=" + std::to_string(sol.report.iterations.size()));
  }
  double e[2];
  bool converged = true;
  int i = 0;
  IterationConfig cfg;
  cfg.tol = 1e-9;
  cfg.trust_radius = 1e6;
  for (int n : {17, 33}) {
    auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 0.5, n));
    const auto exact = GridField::from_function(d, [](const Point& x) { return cap_height(x, 2.0, 2); });
    const auto sol = solve_pmc(nullptr, constant_H(1.0, 2), exact, cfg);
    converged = converged && sol.report.status == SolveStatus::converged;
    e[i++] = linf_norm(sol.u - exact);
  }
  add(out, S, "cap_converges", converged && e[1] <= 5e-3, kv("max_error", e[1]));
  add(out, S, "cap_second_order", e[0] / e[1] >= 3.0, kv("ratio", e[0] / e[1]));

  auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 0.5, 17));
  const auto phi = GridField::from_function(d, [](const Point& x) { return 0.2 * x[0]; });
  const auto bump = GridField::from_function(d, [](const Point& x) { return 0.4 * (0.25 - x[0] * x[0] - x[1] * x[1]); });
  const auto P = tanh_decreasing(1.0, 2);
  const auto a = solve_pmc(nullptr, P, phi, cfg);
  const auto b = solve_pmc(nullptr, P, phi, cfg, phi + bump);
  const double diff = linf_norm(a.u - b.u);
  add(out, S, "uniqueness_two_starts", diff <= 10.0 * cfg.tol, kv("max_diff", diff));

  auto ds = build_domain(DomainSpec::disc({0.0, 0.0}, 1.0, 17));
  const auto h = GridField::from_function(ds, scherk_height);
  const auto g = GridField::from_function(ds, [](const Point& x) { return 0.05 * x[1]; });
  IterationConfig small;
  small.tol = 1e-6;
  const auto sol = solve_pmc(&h, vertical_gaussian(0.1, *ds, 2.0), g, small);
  double bd = 0.0;
  for (int id : ds->boundary()) bd = std::max(bd, std::abs(sol.u[id] - h[id] - g[id]));
  add(out, S, "boundary_exactness", sol.report.status == SolveStatus::converged && bd <= 1e-12,
      "status=" + to_string(sol.report.status) + " " + kv("max_defect", bd));
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"geometry", "norms", "linear", "trace", "fixedpoint"};
  return names;
}

std::vector<CheckResult> run_verify(const std::string& suite, std::uint64_t seed) {
  static const std::vector<std::pair<std::string, std::function<void(std::uint64_t, Checks&)>>> table{
      {"geometry", geometry_suite}, {"norms", norms_suite},           {"linear", linear_suite},
      {"trace", trace_suite},       {"fixedpoint", fixedpoint_suite},
  };
  Checks out;
  bool found = false;
  for (const auto& [name, fn] : table) {
    if (suite != "all" && suite != name) continue;
    found = true;
    try {
      fn(seed, out);
    } catch (const std::exception& e) {
      add(out, name, "exception", false, e.what());
    }
  }
  if (!found) throw std::invalid_argument("unknown suite '" + suite + "' (geometry, norms, linear, trace, fixedpoint, all)");
  return out;
}

}  // namespace pmc
