#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pmc/config.hpp"
#include "pmc/exact.hpp"
#include "pmc/io_util.hpp"
#include "pmc/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pmc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("pmc_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& contents) const {
    const auto p = path / name;
    std::ofstream(p) << contents;
    return p.string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kCapConfig = R"(# cap over a disc
domain.shape = disc
domain.radius = 0.5
domain.nodes = 33
prescription.name = constant
prescription.c = 1
boundary.kind = cap
boundary.radius = 2
iteration.tol = 1e-9
iteration.trust_radius = 1e6
)";

}  // namespace

TEST_CASE("config round trip: parse, serialize, parse is the identity") {
  for (const std::string text :
       {std::string(kCapConfig),
        std::string("domain.shape = interval\ndomain.lower = -1\ndomain.upper = 2\ndomain.nodes = 21\nsobolev.n = 1\n"
                    "sobolev.p = 1.5\n"),
        std::string("domain.lower = -1.2, -1.2\ndomain.upper = 1.2,1.2\ndomain.nodes = 33,17\nbase.kind = scherk\n"
                    "prescription.name = vertical_gaussian\nprescription.s = 0.1\nsweep.s_values = 0, 0.1, 0.30000000000000004\n"
                    "iteration.upwind = true\nrun.seed = 42\n")}) {
    const RunConfig a = parse_config(text);
    const std::string once = serialize_config(a);
    const RunConfig b = parse_config(once);
    CHECK(a == b);
    CHECK(serialize_config(b) == once);
  }
  const RunConfig c = parse_config("sweep.s_values = 0.1,0.30000000000000004\n");
  CHECK(c.s_values[1] == 0.30000000000000004);
}

TEST_CASE("config errors name the offending key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("sobolev.p = 3.5\n") == "sobolev.p");
  CHECK(key_of("sobolev.p = 1.2\n") == "sobolev.p");
  CHECK(key_of("iteration.tol = abc\n") == "iteration.tol");
  CHECK(key_of("iteration.damping = 1.5\n") == "iteration.damping");
  CHECK(key_of("bogus.key = 1\n") == "bogus.key");
  CHECK(key_of("domain.shape = disc\ndomain.lower = 0,0\n") == "domain.lower");
  CHECK(key_of("domain.shape = hexagon\n") == "domain.shape");
  CHECK(key_of("prescription.name = cubic\n") == "prescription.name");
  CHECK(key_of("iteration.max_iters = 2.5\n") == "iteration.max_iters");
  CHECK(key_of("sobolev.n = 1\n") == "sobolev.n");
  CHECK(key_of("sweep.s_values = 0.2, 0.1\n") == "sweep.s_values");
  CHECK(key_of("boundary.kind = file\nboundary.file = /nonexistent/phi.csv\n") == "boundary.file");
  CHECK(key_of("iteration.tol = 1\niteration.tol = 2\n") == "iteration.tol");
  CHECK(key_of("no equals sign\n") == "line 1");
  std::string what;
  try {
    parse_config("sobolev.p = 3.5\n");
  } catch (const ConfigError& e) {
    what = e.what();
  }
  CHECK(what.find("upper bound") != std::string::npos);
}

TEST_CASE("solve: zero data gives exit 0 and a zero field") {
  TempDir t("zero");
  const auto cfg = t.file("zero.cfg", "domain.nodes = 17\noutput.dir = " + (t.path / "out").string() + "\n");
  std::ostringstream out, err;
  CHECK(cmd_solve(cfg, {true}, out, err) == 0);
  const GridField u = read_csv((t.path / "out" / "field.csv").string());
  CHECK(linf_norm(u) == 0.0);
  const json j = json::parse(slurp(t.path / "out" / "report.json"));
  CHECK(j["status"] == "converged");
  CHECK(j["smallness"] == 0.0);
}

TEST_CASE("solve: cap report carries max_error against the analytic cap") {
  TempDir t("cap");
  const auto cfg = t.file("cap.cfg", std::string(kCapConfig) + "output.dir = " + (t.path / "out").string() + "\n");
  std::ostringstream out, err;
  CHECK(cmd_solve(cfg, {false}, out, err) == 0);
  CHECK(err.str().find("iter    1") != std::string::npos);
  const json j = json::parse(slurp(t.path / "out" / "report.json"));
  REQUIRE(j.contains("max_error"));
  CHECK(j["max_error"].get<double>() < 1e-4);
  CHECK(j["smallness"].is_null());
  CHECK(j["smallness_finite"] == false);
  CHECK(j["within_hypotheses"] == false);
  CHECK(j["config"]["prescription.name"] == "constant");
}

TEST_CASE("solve: exit codes for hard errors and non-convergence") {
  TempDir t("codes");
  std::ostringstream out, err;
  const auto bad = t.file("bad.cfg", "sobolev.p = 3.5\n");
  CHECK(cmd_solve(bad, {true}, out, err) == 1);
  CHECK(err.str().find("sobolev.p") != std::string::npos);
  CHECK(cmd_solve((t.path / "missing.cfg").string(), {true}, out, err) == 1);
  const auto trust = t.file("trust.cfg", std::string(kCapConfig) + "iteration.trust_radius = 0.5\noutput.dir = " +
                                             (t.path / "out").string() + "\n");
  std::ostringstream e2;
  // The cap file sets the trust radius twice; duplicates are rejected.
  CHECK(cmd_solve(trust, {true}, out, e2) == 1);
  CHECK(e2.str().find("iteration.trust_radius") != std::string::npos);
  std::string small = kCapConfig;
  small.replace(small.find("1e6"), 3, "0.5");
  const auto tv = t.file("tv.cfg", small + "output.dir = " + (t.path / "out").string() + "\n");
  CHECK(cmd_solve(tv, {true}, out, err) == 2);
}

TEST_CASE("solve: base graph and boundary data from files, PMC_OUTPUT_DIR override") {
  TempDir t("files");
  auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 1.0, 17));
  write_csv(GridField::from_function(d, scherk_height, "h"), (t.path / "h.csv").string());
  write_csv(GridField::constant(d, 0.0, "phi"), (t.path / "phi.csv").string());
  const auto cfg = t.file("f.cfg",
                          "domain.shape = disc\ndomain.nodes = 17\nbase.kind = file\nbase.file = h.csv\n"
                          "boundary.kind = file\nboundary.file = phi.csv\nprescription.name = vertical_gaussian\n"
                          "prescription.s = 0.05\niteration.tol = 1e-7\noutput.dir = unused\noutput.dumps = true\n");
  const std::string override_dir = (t.path / "env_out").string();
  ::setenv("PMC_OUTPUT_DIR", override_dir.c_str(), 1);
  std::ostringstream out, err;
  const int code = cmd_solve(cfg, {true}, out, err);
  ::unsetenv("PMC_OUTPUT_DIR");
  CHECK(code == 0);
  CHECK(fs::exists(fs::path(override_dir) / "report.json"));
  CHECK(fs::exists(fs::path(override_dir) / "perturbation.csv"));
  CHECK(fs::exists(fs::path(override_dir) / "iterations" / "iter_00001.csv"));
  CHECK_FALSE(fs::exists("unused"));
}

TEST_CASE("sweep: trivial grid, summary columns, determinism") {
  TempDir t("sweep");
  const std::string base =
      "domain.shape = disc\ndomain.nodes = 17\nbase.kind = scherk\nprescription.name = vertical_gaussian\n"
      "iteration.tol = 1e-7\n";
  std::ostringstream out, err;
  const auto one = t.file("one.cfg", base + "sweep.s_values = 0\noutput.dir = " + (t.path / "one").string() + "\n");
  CHECK(cmd_sweep(one, {true}, out, err) == 0);
  CHECK(slurp(t.path / "one" / "sweep_summary.csv") == "s,status,w2q_distance,iterations\n0,converged,0,1\n");

  const auto many = t.file("many.cfg", base + "sweep.s_values = 0.01, 0.1, 0.3, 1, 1000\noutput.dir = " +
                                           (t.path / "a").string() + "\n");
  CHECK(cmd_sweep(many, {true}, out, err) == 0);
  const std::string first = slurp(t.path / "a" / "sweep_summary.csv");
  fs::rename(t.path / "a", t.path / "first");
  CHECK(cmd_sweep(many, {true}, out, err) == 0);
  CHECK(slurp(t.path / "a" / "sweep_summary.csv") == first);
  CHECK(fs::exists(t.path / "a" / "sweep" / "report_00004.json"));

  std::istringstream rows(first);
  std::string line;
  std::getline(rows, line);
  double prev = -1.0;
  while (std::getline(rows, line)) {
    std::stringstream cells(line);
    std::string s, status, w2q;
    std::getline(cells, s, ',');
    std::getline(cells, status, ',');
    std::getline(cells, w2q, ',');
    if (status != "converged") break;
    CHECK(std::stod(w2q) > prev);
    prev = std::stod(w2q);
  }
  CHECK(prev > 0.0);
  CHECK(first.find("1000,converged") == std::string::npos);

  const auto none = t.file("none.cfg", base);
  CHECK(cmd_sweep(none, {true}, out, err) == 1);
}

TEST_CASE("norms and verify commands") {
  TempDir t("norms");
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  write_csv(GridField::constant(d, 1.0, "one"), (t.path / "one.csv").string());
  std::ostringstream out, err;
  CHECK(cmd_norms((t.path / "one.csv").string(), 2.0, 2, out, err) == 0);
  const json j = json::parse(out.str());
  CHECK(j["Lq"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["q"] == 4.0);
  CHECK(cmd_norms((t.path / "one.csv").string(), 3.5, 2, out, err) == 1);
  CHECK(cmd_norms((t.path / "one.csv").string(), 1.5, 1, out, err) == 1);

  std::ostringstream vout;
  CHECK(cmd_verify("norms", 3, vout, err) == 0);
  CHECK(vout.str().find("PASS  norms") != std::string::npos);
  CHECK(cmd_verify("nonsense", 0, vout, err) == 1);
}
