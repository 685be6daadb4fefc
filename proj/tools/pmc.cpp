#include "pmc/run.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"pmc: prescribed mean curvature graphs by damped Picard iteration"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress per-iteration logs");

  std::string config;
  auto* solve = app.add_subcommand("solve", "Solve one configured problem");
  solve->add_option("config", config, "key = value configuration file")->required();
  auto* sweep = app.add_subcommand("sweep", "Continuation sweep over sweep.s_values");
  sweep->add_option("config", config, "key = value configuration file")->required();

  std::string suite;
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("suite", suite, "geometry | norms | linear | trace | fixedpoint | all")->required();
  verify->add_option("--seed", seed, "RNG seed");

  std::string field;
  double p = 2.0;
  int n = 2;
  auto* norms = app.add_subcommand("norms", "Discrete norms of a field CSV");
  norms->add_option("field", field, "field CSV")->required();
  norms->add_option("--p", p, "Sobolev exponent p")->required();
  norms->add_option("--n", n, "space dimension")->required();

  for (auto* sub : {solve, sweep, verify, norms}) sub->add_flag("--quiet", quiet, "Suppress per-iteration logs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const pmc::CommandOptions opt{quiet};
  if (*solve) return pmc::cmd_solve(config, opt, std::cout, std::cerr);
  if (*sweep) return pmc::cmd_sweep(config, opt, std::cout, std::cerr);
  if (*verify) return pmc::cmd_verify(suite, seed, std::cout, std::cerr);
  return pmc::cmd_norms(field, p, n, std::cout, std::cerr);
}
