#pragma once

#include "pmc/domain.hpp"
#include "pmc/fixed_point.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmc {

/// Malformed or inconsistent configuration; `key` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat key = value run description. Recognised keys (defaults in brackets):
///
///   domain.shape       rectangle | disc | interval           [rectangle]
///   domain.lower       x1,x2 (rectangle) or a (interval)     [0,0]
///   domain.upper                                             [1,1]
///   domain.center      x1,x2 (disc)                          [0,0]
///   domain.radius                                            [1]
///   domain.nodes       n or nx,ny                            [33]
///   base.kind          none | affine | scherk | file         [none]
///   base.slope, base.offset, base.file
///   prescription.name  zero | constant | vertical_gaussian | singular | tanh_decreasing [zero]
///   prescription.c, prescription.s, prescription.gamma, prescription.x0
///   boundary.kind      zero | affine | cap | file             [zero]
///   boundary.slope, boundary.offset, boundary.radius, boundary.file
///   sobolev.n, sobolev.p                                     [2, 2]
///   iteration.damping, iteration.max_iters, iteration.tol, iteration.trust_radius,
///   iteration.divergence_factor, iteration.linear_tol, iteration.upwind
///   output.dir, output.dumps                                 [pmc_out, false]
///   run.seed                                                 [0]
///   sweep.s_values     comma-separated, strictly increasing
///
/// In a sweep, s replaces prescription.s (vertical_gaussian, tanh_decreasing)
/// or prescription.c (constant, singular). load_config resolves relative
/// base.file and boundary.file paths against the config file's directory.
struct RunConfig {
  DomainSpec domain = DomainSpec::square(0.0, 1.0, 33);

  std::string base_kind = "none";
  std::vector<double> base_slope{0.0, 0.0};
  double base_offset = 0.0;
  std::string base_file;

  std::string prescription = "zero";
  double c = 0.0;
  double s = 0.0;
  double gamma = 0.25;
  Point x0{0.0, 0.0};

  std::string boundary_kind = "zero";
  std::vector<double> boundary_slope{0.0, 0.0};
  double boundary_offset = 0.0;
  double boundary_radius = 2.0;
  std::string boundary_file;

  int n = 2;
  double p = 2.0;

  double damping = 1.0;
  int max_iters = 200;
  double tol = 1e-8;
  double trust_radius = 1.0;
  double divergence_factor = 10.0;
  double linear_tol = 1e-12;
  bool upwind = false;

  std::string output_dir = "pmc_out";
  bool dumps = false;
  std::uint64_t seed = 0;
  std::vector<double> s_values;

  bool operator==(const RunConfig&) const = default;

  /// Cross-key checks (derive_q range, dimension match, enum values, sweep
  /// ordering). Throws ConfigError.
  void validate() const;

  IterationConfig iteration() const;
  SobolevParams params() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and unparsable values throw ConfigError naming the key. Relative file
/// paths are kept as written.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key in sorted order, doubles in round-trip form.
std::string serialize_config(const RunConfig& cfg);
std::map<std::string, std::string> config_entries(const RunConfig& cfg);

}  // namespace pmc
