#pragma once

#include "pmc/config.hpp"
#include "pmc/fixed_point.hpp"

#include "json.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace pmc {

/// Fields and prescription family built from a RunConfig.
struct RunSetup {
  DomainPtr domain;
  std::optional<GridField> h;
  GridField phi;
  /// Prescription as a function of the sweep parameter.
  std::function<Prescription(double)> family;
  /// Value of the sweep parameter named in the config.
  double s = 0.0;
  /// Analytic cap for boundary.kind = cap without a base.
  std::optional<GridField> cap;
};

/// Throws ConfigError naming the key whose data cannot be realised.
RunSetup build_run(const RunConfig& cfg);

/// output.dir, overridden by PMC_OUTPUT_DIR when set and non-empty.
std::string resolve_output_dir(const RunConfig& cfg);

nlohmann::json linear_report_json(const LinearSolveReport& r);
nlohmann::json solve_report_json(const SolveReport& r, const IterationConfig& cfg);

struct CommandOptions {
  bool quiet = false;
};

/// Exit codes: 0 converged, 2 diverged / trust_violation / max_iters, 1 on
/// hard errors (message on `err`, naming the offending key).
int cmd_solve(const std::string& config_path, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Writes sweep/report_<index>.json per s and sweep_summary.csv. Exit 0 once
/// the sweep completes; per-s outcomes are in the summary.
int cmd_sweep(const std::string& config_path, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Prints the norms of a field CSV as JSON.
int cmd_norms(const std::string& field_path, double p, int n, std::ostream& out, std::ostream& err);

/// Runs a verification suite; prints one PASS/FAIL line per check. Exit 0 iff
/// every check passes, 1 for an unknown suite.
int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err);

}  // namespace pmc
