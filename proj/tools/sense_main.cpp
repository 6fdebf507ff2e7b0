// SPDX-License-Identifier: Apache-2.0
//
// Command-line experiment runner:
//   sense <curves|roc|pd-vs-n|validate> --config <path> [--out <path>]
//                                       [--seed <u64>] [--trials <n>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sense/experiments.hpp"

int main(int argc, char **argv) {
  CLI::App app{
      "sense — spectrum sensing performance for a RIS-aided link via exact "
      "maximum-eigenvalue detection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  long long trials = 0;
  bool seed_given = false;
  bool trials_given = false;
  bool out_given = false;

  const char *descriptions[4][2] = {
      {"curves", "P_FA / P_MD versus threshold, per RIS size"},
      {"roc", "P_D versus target P_FA across scenario sweeps"},
      {"pd-vs-n", "P_D at a fixed P_FA across the RIS-size sweep"},
      {"validate", "run the cross-module validation suite"},
  };
  for (const auto &entry : descriptions) {
    CLI::App *sub = app.add_subcommand(entry[0], entry[1]);
    sub->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (overrides config)")
        ->each([&out_given](const std::string &) { out_given = true; });
    sub->add_option("--seed", seed, "seed override")
        ->each([&seed_given](const std::string &) { seed_given = true; });
    sub->add_option("--trials", trials, "Monte Carlo trials override")
        ->check(CLI::NonNegativeNumber)
        ->each([&trials_given](const std::string &) { trials_given = true; });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    sense::ExperimentConfig cfg = sense::load_config(config_path);
    if (cfg.experiment.empty())
      cfg.experiment = experiment;
    else if (cfg.experiment != experiment) {
      std::cerr << "error: config declares experiment '" << cfg.experiment
                << "' but the '" << experiment << "' subcommand was invoked\n";
      return 2;
    }
    if (out_given) cfg.out_path = out_path;
    if (seed_given) cfg.seed = seed;
    if (trials_given) cfg.trials = trials;
    return sense::run_experiment(cfg, std::cout);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
