#include "pmc/config.hpp"

#include "pmc/io_util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pmc {

namespace {

const std::set<std::string> kPrescriptions{"zero", "constant", "vertical_gaussian", "singular", "tanh_decreasing"};
const std::set<std::string> kBaseKinds{"none", "affine", "scherk", "file"};
const std::set<std::string> kBoundaryKinds{"zero", "affine", "cap", "file"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v, key);
  } catch (const std::invalid_argument&) {
    throw ConfigError(key, "'" + v + "' is not a number");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v, std::size_t min_n, std::size_t max_n) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  if (out.size() < min_n || out.size() > max_n)
    throw ConfigError(key, "expected " + (min_n == max_n ? std::to_string(min_n) : std::to_string(min_n) + " to " +
                                                                                     std::to_string(max_n)) +
                               " comma-separated values, got " + std::to_string(out.size()));
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<double>(static_cast<long long>(d))) throw ConfigError(key, "'" + v + "' is not an integer");
  return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "'" + v + "' is not a boolean (true/false)");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::vector<double> pad2(std::vector<double> v) {
  v.resize(2, 0.0);
  return v;
}

}  // namespace

IterationConfig RunConfig::iteration() const {
  IterationConfig it;
  it.damping = damping;
  it.max_iters = max_iters;
  it.tol = tol;
  it.trust_radius = trust_radius;
  it.divergence_factor = divergence_factor;
  it.linear_tol = linear_tol;
  it.assembly.upwind = upwind;
  it.params = params();
  return it;
}

SobolevParams RunConfig::params() const {
  try {
    return derive_q(n, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sobolev.p", e.what());
  }
}

void RunConfig::validate() const {
  if (n != domain.dim())
    throw ConfigError("sobolev.n", "n = " + std::to_string(n) + " but the domain has dimension " +
                                       std::to_string(domain.dim()));
  params();
  if (!kBaseKinds.count(base_kind)) throw ConfigError("base.kind", "unknown kind '" + base_kind + "'");
  if (!kBoundaryKinds.count(boundary_kind)) throw ConfigError("boundary.kind", "unknown kind '" + boundary_kind + "'");
  if (!kPrescriptions.count(prescription))
    throw ConfigError("prescription.name", "unknown prescription '" + prescription + "'");
  if (base_kind == "file" && !std::filesystem::exists(base_file))
    throw ConfigError("base.file", "file '" + base_file + "' does not exist");
  if (boundary_kind == "file" && !std::filesystem::exists(boundary_file))
    throw ConfigError("boundary.file", "file '" + boundary_file + "' does not exist");
  if (boundary_kind == "cap" && !(boundary_radius > 0.0)) throw ConfigError("boundary.radius", "must be positive");
  try {
    iteration().validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(' ')), what);
  }
  for (std::size_t i = 1; i < s_values.size(); ++i)
    if (!(s_values[i] > s_values[i - 1])) throw ConfigError("sweep.s_values", "values must be strictly increasing");
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) throw ConfigError(key, "duplicate key");
  }

  RunConfig c;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const std::string shape_name = take("domain.shape").value_or("rectangle");
  Shape shape;
  try {
    shape = shape_from_string(shape_name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("domain.shape", "unknown shape '" + shape_name + "'");
  }
  const auto lower = take("domain.lower"), upper = take("domain.upper");
  const auto center = take("domain.center"), radius = take("domain.radius");
  const auto nodes = take("domain.nodes");
  auto reject = [&](const std::optional<std::string>& v, const std::string& key) {
    if (v) throw ConfigError(key, "not used for domain.shape = " + shape_name);
  };
  if (shape == Shape::interval) {
    reject(center, "domain.center");
    reject(radius, "domain.radius");
    const double a = lower ? to_list("domain.lower", *lower, 1, 1)[0] : 0.0;
    const double b = upper ? to_list("domain.upper", *upper, 1, 1)[0] : 1.0;
    const int nn = nodes ? static_cast<int>(to_int("domain.nodes", *nodes)) : 33;
    c.domain = DomainSpec::interval(a, b, nn);
  } else if (shape == Shape::rectangle) {
    reject(center, "domain.center");
    reject(radius, "domain.radius");
    const auto lo = lower ? to_list("domain.lower", *lower, 2, 2) : std::vector<double>{0.0, 0.0};
    const auto hi = upper ? to_list("domain.upper", *upper, 2, 2) : std::vector<double>{1.0, 1.0};
    std::vector<double> nn{33.0, 33.0};
    if (nodes) {
      nn = to_list("domain.nodes", *nodes, 1, 2);
      if (nn.size() == 1) nn.push_back(nn[0]);
    }
    for (double v : nn)
      if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("domain.nodes", "node counts must be integers");
    c.domain = DomainSpec::rectangle({lo[0], lo[1]}, {hi[0], hi[1]}, static_cast<int>(nn[0]), static_cast<int>(nn[1]));
  } else {
    reject(lower, "domain.lower");
    reject(upper, "domain.upper");
    const auto ce = center ? to_list("domain.center", *center, 2, 2) : std::vector<double>{0.0, 0.0};
    const double r = radius ? to_double("domain.radius", *radius) : 1.0;
    const int nn = nodes ? static_cast<int>(to_int("domain.nodes", *nodes)) : 33;
    c.domain = DomainSpec::disc({ce[0], ce[1]}, r, nn);
  }
  c.n = c.domain.dim();

  if (auto v = take("base.kind")) c.base_kind = *v;
  if (auto v = take("base.slope")) c.base_slope = pad2(to_list("base.slope", *v, 1, 2));
  if (auto v = take("base.offset")) c.base_offset = to_double("base.offset", *v);
  if (auto v = take("base.file")) c.base_file = *v;

  if (auto v = take("prescription.name")) c.prescription = *v;
  if (auto v = take("prescription.c")) c.c = to_double("prescription.c", *v);
  if (auto v = take("prescription.s")) c.s = to_double("prescription.s", *v);
  if (auto v = take("prescription.gamma")) c.gamma = to_double("prescription.gamma", *v);
  if (auto v = take("prescription.x0")) {
    const auto x = pad2(to_list("prescription.x0", *v, 1, 2));
    c.x0 = {x[0], x[1]};
  }

  if (auto v = take("boundary.kind")) c.boundary_kind = *v;
  if (auto v = take("boundary.slope")) c.boundary_slope = pad2(to_list("boundary.slope", *v, 1, 2));
  if (auto v = take("boundary.offset")) c.boundary_offset = to_double("boundary.offset", *v);
  if (auto v = take("boundary.radius")) c.boundary_radius = to_double("boundary.radius", *v);
  if (auto v = take("boundary.file")) c.boundary_file = *v;

  if (auto v = take("sobolev.n")) c.n = static_cast<int>(to_int("sobolev.n", *v));
  if (auto v = take("sobolev.p")) c.p = to_double("sobolev.p", *v);

  if (auto v = take("iteration.damping")) c.damping = to_double("iteration.damping", *v);
  if (auto v = take("iteration.max_iters")) c.max_iters = static_cast<int>(to_int("iteration.max_iters", *v));
  if (auto v = take("iteration.tol")) c.tol = to_double("iteration.tol", *v);
  if (auto v = take("iteration.trust_radius")) c.trust_radius = to_double("iteration.trust_radius", *v);
  if (auto v = take("iteration.divergence_factor")) c.divergence_factor = to_double("iteration.divergence_factor", *v);
  if (auto v = take("iteration.linear_tol")) c.linear_tol = to_double("iteration.linear_tol", *v);
  if (auto v = take("iteration.upwind")) c.upwind = to_bool("iteration.upwind", *v);

  if (auto v = take("output.dir")) c.output_dir = *v;
  if (auto v = take("output.dumps")) c.dumps = to_bool("output.dumps", *v);
  if (auto v = take("run.seed")) {
    const long long s = to_int("run.seed", *v);
    if (s < 0) throw ConfigError("run.seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("sweep.s_values")) {
    if (!v->empty()) c.s_values = to_list("sweep.s_values", *v, 1, 100000);
  }

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  // Resolve relative data files against the config's directory before validation.
  std::string text = buf.str();
  const auto dir = std::filesystem::path(path).parent_path();
  std::istringstream lines(text);
  std::string line, rewritten;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      const std::string key = trim(line.substr(0, eq));
      std::string value = line.substr(eq + 1);
      const auto hash = value.find('#');
      if (hash != std::string::npos) value.erase(hash);
      value = trim(value);
      if ((key == "base.file" || key == "boundary.file") && !value.empty() &&
          std::filesystem::path(value).is_relative() && !dir.empty())
        line = key + " = " + (dir / value).string();
    }
    rewritten += line + '\n';
  }
  return parse_config(rewritten);
}

std::map<std::string, std::string> config_entries(const RunConfig& c) {
  std::map<std::string, std::string> m;
  const DomainSpec& d = c.domain;
  m["domain.shape"] = to_string(d.shape);
  switch (d.shape) {
    case Shape::interval:
      m["domain.lower"] = format_double(d.lower[0]);
      m["domain.upper"] = format_double(d.upper[0]);
      m["domain.nodes"] = std::to_string(d.nodes[0]);
      break;
    case Shape::rectangle:
      m["domain.lower"] = join({d.lower[0], d.lower[1]});
      m["domain.upper"] = join({d.upper[0], d.upper[1]});
      m["domain.nodes"] = std::to_string(d.nodes[0]) + "," + std::to_string(d.nodes[1]);
      break;
    case Shape::disc:
      m["domain.center"] = join({d.center[0], d.center[1]});
      m["domain.radius"] = format_double(d.radius);
      m["domain.nodes"] = std::to_string(d.nodes[0]);
      break;
  }
  m["base.kind"] = c.base_kind;
  m["base.slope"] = join(c.base_slope);
  m["base.offset"] = format_double(c.base_offset);
  m["base.file"] = c.base_file;
  m["prescription.name"] = c.prescription;
  m["prescription.c"] = format_double(c.c);
  m["prescription.s"] = format_double(c.s);
  m["prescription.gamma"] = format_double(c.gamma);
  m["prescription.x0"] = join({c.x0[0], c.x0[1]});
  m["boundary.kind"] = c.boundary_kind;
  m["boundary.slope"] = join(c.boundary_slope);
  m["boundary.offset"] = format_double(c.boundary_offset);
  m["boundary.radius"] = format_double(c.boundary_radius);
  m["boundary.file"] = c.boundary_file;
  m["sobolev.n"] = std::to_string(c.n);
  m["sobolev.p"] = format_double(c.p);
  m["iteration.damping"] = format_double(c.damping);
  m["iteration.max_iters"] = std::to_string(c.max_iters);
  m["iteration.tol"] = format_double(c.tol);
  m["iteration.trust_radius"] = format_double(c.trust_radius);
  m["iteration.divergence_factor"] = format_double(c.divergence_factor);
  m["iteration.linear_tol"] = format_double(c.linear_tol);
  m["iteration.upwind"] = c.upwind ? "true" : "false";
  m["output.dir"] = c.output_dir;
  m["output.dumps"] = c.dumps ? "true" : "false";
  m["run.seed"] = std::to_string(c.seed);
  m["sweep.s_values"] = join(c.s_values);
  return m;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_entries(c)) out += k + " = " + v + '\n';
  return out;
}

}  // namespace pmc
