// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>

#include "CLI11.hpp"
#include "aopt/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary-shape and excitation optimization for a nonlinear acoustics-plate model"};
  app.require_subcommand(1);

  std::string config_path;
  aopt::RunOptions opts;
  if (const char* env = std::getenv("AOPT_OUT")) opts.out_override = env;

  const std::vector<std::string> commands = {"forward", "adjoint", "gradcheck",
                                             "taylor",  "optimize", "energy"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "path to the run configuration")->required();
    sub->add_option("--jobs", opts.jobs, "worker threads for the embarrassingly parallel checks");
    sub->add_option("--out", opts.out_override, "output directory (overrides config and AOPT_OUT)");
    if (name == "optimize") sub->add_flag("--resume", opts.resume, "continue from the last checkpoint");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  return aopt::run_command(app.get_subcommands().front()->get_name(), config_path, opts);
}
