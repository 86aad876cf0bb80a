#include "cmcfol/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace cmcfol::cli;
  CLI::App app{"CMC leaves in hyperbolic 3-space asymptotic to ideal curves"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string config, manifest, sub, out;
  double H = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto common = [&](CLI::App* c) {
    c->add_option("--out", out, "Output directory");
    c->add_option("--seed", seed, "Seed for generated inputs");
  };

  auto* solve = app.add_subcommand("solve", "Solve one leaf");
  solve->add_option("--config", config, "Run configuration")->required();
  solve->add_option("--h", H, "Mean curvature")->required();
  common(solve);

  auto* sweep = app.add_subcommand("sweep", "Solve the configured H grid");
  sweep->add_option("--config", config, "Run configuration")->required();
  sweep->add_option("--jobs", jobs, "Concurrent leaves (cold starts when > 1)");
  common(sweep);

  auto* verify = app.add_subcommand("verify", "Check a computed family");
  verify->add_option("manifest", manifest, "manifest.json of a sweep")->required();
  verify->add_option("--out", out, "Directory for report.json");

  auto* oracle = app.add_subcommand("oracle", "Closed-form reference suites");
  oracle->add_option("suite", sub, "cap-compare | h2-foliation | h2-exchange")->required();
  oracle->add_option("--config", config, "Run configuration (cap-compare)");
  common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  Options opt;
  auto given = [](CLI::App* c, const char* name) { return c->count(name) > 0; };
  CLI::App* used = app.get_subcommands().front();
  if (given(used, "--out")) opt.out = out;
  if (used != verify && given(used, "--seed")) opt.seed = seed;
  if (used == sweep && given(used, "--jobs")) opt.jobs = jobs;

  if (used == solve) return cmd_solve(config, H, opt, std::cerr);
  if (used == sweep) return cmd_sweep(config, opt, std::cerr);
  if (used == verify) return cmd_verify(manifest, opt, std::cerr);
  return cmd_oracle(sub, config, opt, std::cerr);
}
