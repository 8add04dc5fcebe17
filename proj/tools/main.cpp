#include "CLI11.hpp"

#include <iostream>

#include "zeff/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Effective operators for discrete electrical networks"};
  app.require_subcommand(1);

  zeff::cli::RunConfig cfg;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", cfg.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", cfg.seed, "Seed recorded in the report and used for sampling");
    cmd->add_option("--eq-atol", cfg.tol.eq_atol, "Absolute matrix-equality tolerance");
    cmd->add_option("--rank-rtol", cfg.tol.rank_rtol, "Relative SVD rank cutoff");
    cmd->add_option("--psd-atol", cfg.tol.psd_atol, "Eigenvalue negativity slack");
  };

  auto* dtn = app.add_subcommand("dtn", "Boundary response map of a network file");
  dtn->add_option("file", cfg.input_path, "Network JSON file")->required();
  dtn->add_option("--method", cfg.method, "schur, zproblem or both")
      ->check(CLI::IsMember({"schur", "zproblem", "both"}));
  add_common(dtn);

  auto* effcond = app.add_subcommand("effcond", "Effective conductivity between two nodes");
  effcond->add_option("file", cfg.input_path, "Network JSON file")->required();
  effcond->add_option("--pair", cfg.pair, "Two node names, comma separated")->required();
  add_common(effcond);

  auto* lattice = app.add_subcommand("lattice", "Effective operator of a periodic lattice");
  lattice->add_option("file", cfg.input_path, "Lattice JSON file")->required();
  add_common(lattice);

  auto* zsolve = app.add_subcommand("zsolve", "Solve a coordinate-aligned Z-problem");
  zsolve->add_option("file", cfg.input_path, "Z-problem JSON file")->required();
  zsolve->add_option("--e0", cfg.e0_literal, "Comma-separated U coordinates")->required();
  add_common(zsolve);

  auto* verify = app.add_subcommand("verify", "Run the theorem-check suites");
  verify->add_option("--suite", cfg.suite,
                     "all, counterexamples, numkit, blockop, hodge, zproblem, network, lattice")
      ->check(CLI::IsMember({"all", "counterexamples", "numkit", "blockop", "hodge", "zproblem",
                             "network", "lattice"}));
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  return zeff::cli::run(cfg, std::cout, std::cerr);
}
