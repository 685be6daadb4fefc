// Acceptance criteria A1-A8. One PASS/FAIL line per criterion; exit status 0
// iff every criterion passes. Usage: acceptance <path-to-pmc>

#include "pmc/exact.hpp"
#include "pmc/fixed_point.hpp"
#include "pmc/geometry.hpp"
#include "pmc/io_util.hpp"
#include "pmc/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace pmc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double interior_max(const GridField& r) {
  double m = 0.0;
  for (int id : r.domain().interior()) m = std::max(m, std::abs(r[id]));
  return m;
}

// A1: xi^T A(z) xi >= (1 + |z|^2)^(-3/2) |xi|^2 on 10^4 samples with |z| <= 10.
Outcome a1() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = -1e300;
  for (int k = 0; k < 10000; ++k) {
    const double r = 10.0 * std::sqrt(std::abs(u(rng))), ang = std::numbers::pi * u(rng);
    const std::array<double, 2> z{r * std::cos(ang), r * std::sin(ang)};
    const std::array<double, 2> xi{u(rng), u(rng)};
    const double lam = std::pow(1.0 + r * r, -1.5);
    worst = std::max(worst, lam * (xi[0] * xi[0] + xi[1] * xi[1]) - coeff_matrix(z).quadratic_form(xi));
  }
  return {worst <= 1e-12, "max violation " + fmt("%.3e", std::max(worst, 0.0)) + " (<= 1e-12)"};
}

// A2: Scherk residual of the divergence form, ratios over 33, 65, 129 nodes.
Outcome a2() {
  double e[3];
  int i = 0;
  for (int n : {33, 65, 129}) {
    auto d = build_domain(DomainSpec::square(-1.2, 1.2, n));
    e[i++] = interior_max(mean_curvature_div(GridField::from_function(d, scherk_height)));
  }
  const double r1 = e[0] / e[1], r2 = e[1] / e[2];
  const bool ok = r1 >= 3.3 && r1 <= 4.7 && r2 >= 3.3 && r2 <= 4.7;
  return {ok, "residuals " + fmt("%.3e", e[0]) + " " + fmt("%.3e", e[1]) + " " + fmt("%.3e", e[2]) + ", ratios " +
                  fmt("%.3f", r1) + " " + fmt("%.3f", r2) + " (in [3.3, 4.7])"};
}

// A3: constant H = 1 on the disc of radius 0.5 with cap data, R = 2.
Outcome a3() {
  IterationConfig cfg;
  cfg.tol = 1e-7;
  cfg.trust_radius = 1e6;
  double e[2];
  bool ok = true;
  int i = 0;
  for (int n : {65, 129}) {
    auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 0.5, n));
    const auto exact = GridField::from_function(d, [](const Point& x) { return cap_height(x, 2.0, 2); });
    const auto sol = solve_pmc(nullptr, constant_H(1.0, 2), exact, cfg);
    ok = ok && sol.report.status == SolveStatus::converged && sol.report.residual_check;
    e[i++] = linf_norm(sol.u - exact);
  }
  const double ratio = e[0] / e[1];
  ok = ok && e[0] <= 5e-3 && ratio >= 3.3 && ratio <= 4.7;
  return {ok, "converged; error@65 " + fmt("%.3e", e[0]) + " (<= 5e-3), error@129 " + fmt("%.3e", e[1]) +
                  ", ratio " + fmt("%.3f", ratio) + " (in [3.3, 4.7])"};
}

// A4: 20 random linear systems with ||v||_{C^{1,alpha}} <= 1.
Outcome a4() {
  double unique = 0.0, drift = 0.0, ratio_max = 0.0;
  int clean = 0, mp_fail = 0;
  auto system = [](int n, bool disc, int k, double sign) {
    auto d = build_domain(disc ? DomainSpec::disc({0.5, 0.5}, 0.5, n) : DomainSpec::square(0.0, 1.0, n));
    auto v = GridField::from_function(d, random_smooth_function(41, k));
    v *= 1.0 / holder_c1beta(v, 0.25);
    const auto shape = random_smooth_function(42, k);
    const auto f = GridField::from_function(d, [&](const Point& x) { return sign * shape(x) * shape(x); });
    const auto phi = GridField::from_function(d, random_smooth_function(43, k));
    return assemble(v, nullptr, f, phi);
  };
  for (int k = 0; k < 20; ++k) {
    const bool disc = k % 2 == 1;
    const double sign = k % 4 < 2 ? 1.0 : -1.0;
    const auto sys = system(33, disc, k, sign);
    const auto direct = solve(sys);
    LinearSolveOptions opt;
    opt.method = SolveMethod::iterative;
    opt.tol = 1e-12;
    const auto cold = solve(sys, opt);
    opt.initial_guess = GridField::from_function(sys.domain, random_smooth_function(44, k));
    const auto warm = solve(sys, opt);
    unique = std::max({unique, linf_norm(direct.w - cold.w), linf_norm(direct.w - warm.w)});
    if (!sys.diag_dominance_violation) {
      ++clean;
      const auto& d = *sys.domain;
      double bext = -1e300, iext = -1e300;
      for (int id : d.boundary()) bext = std::max(bext, sign * direct.w[id]);
      for (int id : d.interior()) iext = std::max(iext, sign * direct.w[id]);
      if (iext > bext + 1e-10) ++mp_fail;
    }
    const double r33 = direct.report.estimate_ratio;
    const double r65 = solve(system(65, disc, k, sign)).report.estimate_ratio;
    ratio_max = std::max({ratio_max, r33, r65});
    drift = std::max(drift, std::abs(r33 - r65) / r65);
  }
  const bool ok = unique <= 1e-8 && clean > 0 && mp_fail == 0 && std::isfinite(ratio_max) && drift <= 0.2;
  return {ok, "uniqueness " + fmt("%.2e", unique) + " (<= 1e-8); max principle " + std::to_string(clean - mp_fail) +
                  "/" + std::to_string(clean) + " clean systems; estimate ratio max " + fmt("%.3f", ratio_max) +
                  ", 33 vs 65 drift " + fmt("%.3f", drift) + " (<= 0.2)"};
}

// A5: trace ratio and graph density for G = exp(-t^2) / ||.||, V = 1.
Outcome a5() {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 33));
  const SobolevParams p = derive_q(2, 2.0);
  SlabFunction raw;
  raw.value = [](const Point&, double t) { return std::exp(-t * t); };
  raw.grad = [](const Point&, double t) { return std::array<double, 3>{0.0, 0.0, -2.0 * t * std::exp(-t * t)}; };
  const double s = slab_w1p_norm(raw, *d, p);
  SlabFunction G;
  G.value = [s](const Point&, double t) { return std::exp(-t * t) / s; };
  G.grad = [s](const Point&, double t) { return std::array<double, 3>{0.0, 0.0, -2.0 * t * std::exp(-t * t) / s}; };
  G.T = 2.0;
  G.V = 1.0;
  const RatioSweep r = trace_ratio_sweep(G, d, p, 50, 5);
  double excess = -1e300;
  for (int k = 0; k < 50; ++k) {
    const auto v = random_lipschitz_field(d, 1.0, 5, k);
    excess = std::max(excess, graph_density(v, 16, 500 + static_cast<std::uint64_t>(k)).density - 2.0 * std::numbers::pi);
  }
  const bool ok = std::abs(r.slab_norm - 1.0) <= 1e-12 && r.max_ratio <= kTraceRatioBound && excess <= 1e-2;
  return {ok, "slab norm " + fmt("%.12f", r.slab_norm) + "; max trace ratio " + fmt("%.4f", r.max_ratio) +
                  " (<= recorded " + fmt("%.2f", kTraceRatioBound) + "); max density - 2 pi " + fmt("%.3e", excess) +
                  " (<= 1e-2)"};
}

// A6: f = (0, 0, s exp(-t^2)) around Scherk on the unit disc, phi = 0.
// Transition window from the 129-node continuation oracle: the trust radius
// 1 is crossed between s = 0.30 and s = 0.35 on 33, 65 and 129 nodes.
constexpr double kSLo = 0.25;
constexpr double kSHi = 0.4;
Outcome a6() {
  auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 1.0, 65));
  const auto h = GridField::from_function(d, scherk_height);
  const auto phi = GridField::constant(d, 0.0);
  IterationConfig cfg;
  cfg.tol = 1e-6;
  cfg.trust_radius = 1.0;
  cfg.max_iters = 100;
  bool ok = true;
  double bd = 0.0, agree = 0.0;
  std::string statuses;
  for (double s : {0.05, 0.15, kSLo, kSHi, 1.0, 1000.0}) {
    const auto sol = solve_pmc(&h, vertical_gaussian(s, *d, 2.0), phi, cfg);
    const bool conv = sol.report.status == SolveStatus::converged;
    statuses += (statuses.empty() ? "" : ", ") + fmt("%g", s) + ":" + to_string(sol.report.status);
    if (s <= kSLo) {
      ok = ok && conv;
      if (conv) {
        for (int id : d->boundary()) bd = std::max(bd, std::abs(sol.u[id] - h[id] - phi[id]));
        const auto& last = sol.report.iterations.back();
        agree = std::max(agree, std::abs(last.residual_div - last.residual_nondiv));
        ok = ok && last.residual_div <= 10.0 * cfg.tol && last.residual_nondiv <= 10.0 * cfg.tol;
      }
    } else {
      ok = ok && !conv;
    }
  }
  ok = ok && bd <= 1e-12 && agree <= 10.0 * cfg.tol;
  return {ok, "window [" + fmt("%g", kSLo) + ", " + fmt("%g", kSHi) + "]; " + statuses + "; boundary " +
                  fmt("%.1e", bd) + " (<= 1e-12); residual agreement " + fmt("%.2e", agree) + " (<= 1e-5)"};
}

// A7: monotone-in-t prescription from two starting guesses.
Outcome a7() {
  auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 0.5, 65));
  const auto phi = GridField::from_function(d, [](const Point& x) { return 0.3 * x[0] - 0.2 * x[1] + 0.1; });
  const auto bump = GridField::from_function(d, [](const Point& x) { return 0.4 * (0.25 - x[0] * x[0] - x[1] * x[1]); });
  IterationConfig cfg;
  cfg.tol = 1e-8;
  cfg.trust_radius = 1e6;
  const auto P = tanh_decreasing(2.0, 2);
  const auto a = solve_pmc(nullptr, P, phi, cfg);
  const auto b = solve_pmc(nullptr, P, phi, cfg, phi + bump);
  const double diff = linf_norm(a.u - b.u);
  const bool ok = a.report.status == SolveStatus::converged && b.report.status == SolveStatus::converged &&
                  diff <= 10.0 * cfg.tol;
  return {ok, "start perturbation 0.1; max difference " + fmt("%.2e", diff) + " (<= 1e-7)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// A8: two `pmc sweep` runs with the same config and seed.
Outcome a8(const std::string& pmc) {
  const fs::path dir = fs::temp_directory_path() / "pmc_acceptance_a8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "sweep.cfg";
  std::ofstream(cfg) << "domain.shape = disc\ndomain.radius = 1\ndomain.nodes = 33\nbase.kind = scherk\n"
                        "prescription.name = vertical_gaussian\nsweep.s_values = 0, 0.05, 0.1, 0.2, 0.4, 1, 1000\n"
                        "iteration.tol = 1e-6\niteration.max_iters = 60\nrun.seed = 7\n";
  std::string summaries[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("run" + std::to_string(k));
    const std::string cmd = "PMC_OUTPUT_DIR='" + out.string() + "' '" + pmc + "' sweep '" + cfg.string() +
                            "' --quiet > /dev/null";
    codes[k] = std::system(cmd.c_str());
    summaries[k] = slurp(out / "sweep_summary.csv");
  }
  const bool ok = codes[0] == 0 && codes[1] == 0 && !summaries[0].empty() && summaries[0] == summaries[1];
  fs::remove_all(dir);
  return {ok, std::to_string(summaries[0].size()) + "-byte summaries " + (ok ? "identical" : "differ or missing")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-pmc>\n");
    return 1;
  }
  const std::string pmc = argv[1];
  struct Criterion {
    const char* id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"A1", "ellipticity bound", 1.0, a1},
      {"A2", "minimal-surface oracle", 10.0, a2},
      {"A3", "constant mean curvature cap", 60.0, a3},
      {"A4", "randomized linear suite", 60.0, a4},
      {"A5", "trace and density sweep", 120.0, a5},
      {"A6", "small-data window around Scherk", 120.0, a6},
      {"A7", "uniqueness from two starts", 30.0, a7},
      {"A8", "sweep determinism", 60.0, [&] { return a8(pmc); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.ok && secs < c.budget;
    if (!ok) ++failed;
    std::printf("%s %s  %s: %s [%.2f s of %.0f s]\n", c.id, ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.budget);
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
