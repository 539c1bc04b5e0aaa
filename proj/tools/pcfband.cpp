// Copyright (c) 2026 the pcfband authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcfband/errors.hpp"
#include "pcfband/io.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  pcfband::RunOptions opts;
};

void add_common_options(CLI::App* cmd, CliArgs& args, bool& seed_given,
                        std::uint64_t& seed_value) {
  cmd->add_option("--config", args.config_path, "configuration file (JSON)")
      ->required();
  cmd->add_option("--out", args.opts.out_dir, "output directory");
  cmd->add_option("--threads", args.opts.threads,
                  "worker threads (0 = hardware concurrency)");
  cmd->add_option("--tol", args.opts.tol, "eigensolver tolerance override");
  cmd->add_option("--seed", seed_value, "seed override for randomized checks")
      ->each([&seed_given](const std::string&) { seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcfband: photonic crystal fibre band structure and "
               "interface-regularity analysis"};
  app.require_subcommand(1);

  CliArgs args;
  bool seed_given = false;
  std::uint64_t seed_value = 0;

  CLI::App* bands = app.add_subcommand("bands", "band diagram over a k-path");
  CLI::App* exponents =
      app.add_subcommand("exponents", "corner singular exponents and sigma_epsilon");
  CLI::App* converge =
      app.add_subcommand("converge", "resolution sweep and convergence orders");
  CLI::App* validate =
      app.add_subcommand("validate", "numerical invariant suite");
  CLI::App* field =
      app.add_subcommand("field", "grid samples of H and E for one band");
  for (CLI::App* cmd : {bands, exponents, converge, validate, field}) {
    add_common_options(cmd, args, seed_given, seed_value);
  }

  CLI11_PARSE(app, argc, argv);
  args.opts.seed_set = seed_given;
  args.opts.seed = seed_value;

  try {
    const pcfband::Config cfg = pcfband::load_config(args.config_path);
    if (bands->parsed()) return pcfband::run_bands(cfg, args.opts, std::cout);
    if (exponents->parsed()) {
      return pcfband::run_exponents(cfg, args.opts, std::cout);
    }
    if (converge->parsed()) {
      return pcfband::run_converge(cfg, args.opts, std::cout);
    }
    if (validate->parsed()) {
      return pcfband::run_validate(cfg, args.opts, std::cout);
    }
    if (field->parsed()) return pcfband::run_field(cfg, args.opts, std::cout);
    return pcfband::kExitConfigError;
  } catch (const pcfband::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pcfband::kExitConfigError;
  } catch (const pcfband::SolverDiverged& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return pcfband::kExitSolverError;
  } catch (const pcfband::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pcfband::kExitSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pcfband::kExitSolverError;
  }
}
