#include "pmc/run.hpp"

#include "pmc/exact.hpp"
#include "pmc/io_util.hpp"
#include "pmc/verify.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <sstream>

namespace pmc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double affine(const std::vector<double>& slope, double offset, const Point& x) {
  return offset + slope[0] * x[0] + slope[1] * x[1];
}

GridField load_field(const std::string& key, const std::string& path, const DomainPtr& d) {
  try {
    return read_csv_onto(path, d);
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

/// JSON has no infinities; they become null with a companion flag.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void log_iteration(std::ostream& err, const IterationRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "iter %4d  update %.3e  res_div %.3e  res_nondiv %.3e  trust %.4g  w2q %.4g\n", r.k,
                r.update_norm, r.residual_div, r.residual_nondiv, r.trust_norm, r.w2q_distance);
  err << buf;
}

int status_exit_code(SolveStatus s) { return s == SolveStatus::converged ? 0 : 2; }

}  // namespace

RunSetup build_run(const RunConfig& cfg) {
  cfg.validate();
  RunSetup r;
  try {
    r.domain = build_domain(cfg.domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }
  const DomainPtr& d = r.domain;

  if (cfg.base_kind == "affine") {
    r.h = GridField::from_function(d, [&](const Point& x) { return affine(cfg.base_slope, cfg.base_offset, x); }, "h");
  } else if (cfg.base_kind == "scherk") {
    if (cfg.n != 2) throw ConfigError("base.kind", "scherk needs a two-dimensional domain");
    try {
      r.h = GridField::from_function(d, scherk_height, "h");
    } catch (const std::domain_error&) {
      throw ConfigError("base.kind", "scherk needs the domain inside (-pi/2, pi/2)^2");
    }
  } else if (cfg.base_kind == "file") {
    r.h = load_field("base.file", cfg.base_file, d);
  }

  if (cfg.boundary_kind == "zero") {
    r.phi = GridField::constant(d, 0.0, "phi");
  } else if (cfg.boundary_kind == "affine") {
    r.phi = GridField::from_function(
        d, [&](const Point& x) { return affine(cfg.boundary_slope, cfg.boundary_offset, x); }, "phi");
  } else if (cfg.boundary_kind == "cap") {
    try {
      r.phi = GridField::from_function(d, [&](const Point& x) { return cap_height(x, cfg.boundary_radius, cfg.n); },
                                       "phi");
    } catch (const std::domain_error&) {
      throw ConfigError("boundary.radius", "the cap's ball must contain the domain");
    }
    if (!r.h) r.cap = r.phi;
  } else {
    r.phi = load_field("boundary.file", cfg.boundary_file, d);
  }

  const std::string name = cfg.prescription;
  const int n = cfg.n;
  const double p = cfg.p;
  const RunConfig c = cfg;
  if (name == "zero") {
    r.family = [n](double) { return zero_prescription(n); };
    r.s = 0.0;
  } else if (name == "constant") {
    r.family = [n](double s) { return constant_H(s, n); };
    r.s = cfg.c;
  } else if (name == "vertical_gaussian") {
    r.family = [d, p](double s) { return vertical_gaussian(s, *d, p); };
    r.s = cfg.s;
  } else if (name == "tanh_decreasing") {
    r.family = [n](double s) { return tanh_decreasing(s, n); };
    r.s = cfg.s;
  } else {
    r.family = [d, p, c](double s) { return singular(s, c.gamma, c.x0, *d, p); };
    r.s = cfg.c;
  }
  // Surface prescription errors (gamma range, slab norm) against their keys now.
  try {
    r.family(r.s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name == "singular" ? "prescription.gamma" : "prescription.name", e.what());
  }
  return r;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  const char* env = std::getenv("PMC_OUTPUT_DIR");
  if (env && *env) return env;
  return cfg.output_dir;
}

json linear_report_json(const LinearSolveReport& r) {
  return {{"method", r.method},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"aleksandrov_lhs", r.aleksandrov_lhs},
          {"aleksandrov_rhs", r.aleksandrov_rhs},
          {"aleksandrov_constant", r.aleksandrov_constant},
          {"estimate_ratio", r.estimate_ratio},
          {"diag_dominance_violation", r.diag_dominance_violation},
          {"lambda_min", r.lambda_min},
          {"Lambda_max", r.Lambda_max}};
}

json solve_report_json(const SolveReport& r, const IterationConfig& cfg) {
  json iters = json::array();
  for (const auto& it : r.iterations)
    iters.push_back({{"k", it.k},
                     {"update_norm", it.update_norm},
                     {"residual_div_form", it.residual_div},
                     {"residual_nondiv_form", it.residual_nondiv},
                     {"trust_norm", it.trust_norm},
                     {"w2q_distance", it.w2q_distance},
                     {"linear_iterations", it.linear_iterations}});
  json j{{"status", to_string(r.status)},
         {"update_converged", r.update_converged},
         {"iterations", iters},
         {"iteration_count", r.iterations.size()},
         {"smallness", finite_or_null(r.smallness)},
         {"smallness_finite", std::isfinite(r.smallness)},
         {"slab_norm", finite_or_null(r.slab_norm)},
         {"phi_w2q", r.phi_w2q},
         {"has_base", r.has_base},
         {"prescription", r.prescription},
         {"within_hypotheses", r.within_hypotheses},
         {"note", r.note},
         {"h_scale", r.h_scale},
         {"residual_check", r.residual_check},
         {"max_trust_norm", r.max_trust_norm},
         {"trust_radius", cfg.trust_radius},
         {"final_w2q_distance", r.final_w2q_distance},
         {"w2q_within_trust_radius", r.final_w2q_distance < cfg.trust_radius},
         {"tol", cfg.tol},
         {"damping", cfg.damping},
         {"params", {{"n", cfg.params.n}, {"p", cfg.params.p}, {"q", cfg.params.q}, {"beta", cfg.params.beta}}},
         {"message", r.message}};
  j["linear"] = r.last_linear ? linear_report_json(*r.last_linear) : json(nullptr);
  return j;
}

int cmd_solve(const std::string& config_path, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    const RunSetup setup = build_run(cfg);
    const std::string dir = resolve_output_dir(cfg);
    IterationConfig it = cfg.iteration();
    if (cfg.dumps) it.dump_dir = (fs::path(dir) / "iterations").string();
    if (!opt.quiet) it.on_iteration = [&err](const IterationRecord& r) { log_iteration(err, r); };

    const Prescription P = setup.family(setup.s);
    const PmcSolution sol = solve_pmc(setup.h ? &*setup.h : nullptr, P, setup.phi, it);

    json j = solve_report_json(sol.report, it);
    j["config"] = config_entries(cfg);
    if (setup.cap) {
      j["max_error"] = linf_norm(sol.u - *setup.cap);
      j["cap_mean_curvature"] = cfg.n / cfg.boundary_radius;
    }
    std::ostringstream csv;
    write_csv(sol.u, csv);
    write_file_atomic((fs::path(dir) / "field.csv").string(), csv.str());
    if (setup.h) {
      std::ostringstream vcsv;
      write_csv(sol.v, vcsv);
      write_file_atomic((fs::path(dir) / "perturbation.csv").string(), vcsv.str());
    }
    write_file_atomic((fs::path(dir) / "report.json").string(), j.dump(2) + '\n');
    out << "status " << to_string(sol.report.status) << " after " << sol.report.iterations.size()
        << " iterations; report " << (fs::path(dir) / "report.json").string() << '\n';
    if (setup.cap) out << "max_error " << format_double(j["max_error"].get<double>()) << '\n';
    return status_exit_code(sol.report.status);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const IterationAborted& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_sweep(const std::string& config_path, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (cfg.s_values.empty()) throw ConfigError("sweep.s_values", "missing or empty");
    const RunSetup setup = build_run(cfg);
    for (double s : cfg.s_values) {
      try {
        setup.family(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep.s_values", "s = " + format_double(s) + ": " + e.what());
      }
    }
    const std::string dir = resolve_output_dir(cfg);
    IterationConfig it = cfg.iteration();
    if (!opt.quiet) it.on_iteration = [&err](const IterationRecord& r) { log_iteration(err, r); };
    const SweepReport rep =
        continuation_sweep(setup.h ? &*setup.h : nullptr, setup.family, setup.phi, it, cfg.s_values);

    std::string summary = "s,status,w2q_distance,iterations\n";
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
      const SweepEntry& e = rep.entries[i];
      json j = solve_report_json(e.report, it);
      j["s"] = e.s;
      j["warm_started"] = e.warm_started;
      char name[32];
      std::snprintf(name, sizeof name, "report_%05zu.json", i);
      write_file_atomic((fs::path(dir) / "sweep" / name).string(), j.dump(2) + '\n');
      summary += format_double(e.s) + "," + to_string(e.status) + "," + format_double(e.w2q_distance) + "," +
                 std::to_string(e.iterations) + "\n";
      if (!opt.quiet) err << "s " << format_double(e.s) << ": " << to_string(e.status) << '\n';
    }
    write_file_atomic((fs::path(dir) / "sweep_summary.csv").string(), summary);
    json meta{{"config", config_entries(cfg)},
              {"max_converged_s", rep.max_converged_s ? json(*rep.max_converged_s) : json(nullptr)}};
    write_file_atomic((fs::path(dir) / "sweep.json").string(), meta.dump(2) + '\n');
    out << "sweep of " << rep.entries.size() << " values; largest converged s: "
        << (rep.max_converged_s ? format_double(*rep.max_converged_s) : std::string("none")) << "; summary "
        << (fs::path(dir) / "sweep_summary.csv").string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_norms(const std::string& field_path, double p, int n, std::ostream& out, std::ostream& err) {
  try {
    const SobolevParams params = derive_q(n, p);
    const GridField u = read_csv(field_path);
    if (u.domain().dim() != n)
      throw std::invalid_argument("--n " + std::to_string(n) + " does not match the field's dimension " +
                                  std::to_string(u.domain().dim()));
    json j{{"field", u.name()},
           {"n", n},
           {"p", p},
           {"q", params.q},
           {"beta", params.beta},
           {"sup", linf_norm(u)},
           {"Lq", lq_norm(u, params.q)},
           {"W1p", w1p_norm(u, p)},
           {"W2q", w2q_norm(u, params.q)},
           {"W1inf", w1inf_norm(u)},
           {"C1beta", holder_c1beta(u, params.beta)}};
    out << j.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  std::vector<CheckResult> results;
  try {
    results = run_verify(suite, seed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  bool all = true;
  for (const auto& r : results) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s  %-10s  %-24s  ", r.passed ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str());
    out << buf << r.detail << '\n';
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "some checks failed") << " (" << results.size() << " checks, seed " << seed
      << ")\n";
  return all ? 0 : 1;
}

}  // namespace pmc
