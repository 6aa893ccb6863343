#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lend/errors.hpp"
#include "lend/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Label-noise dilution experiments on embedded feature graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  CLI::App* cmd_run = app.add_subcommand("run", "train the configured methods");
  cmd_run->add_option("--config", config_path, "experiment config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory override");
  cmd_run->add_option("--seed", seed, "training seed override");

  CLI::App* cmd_gen = app.add_subcommand("gen", "write the synthetic datasets");
  cmd_gen->add_option("--config", config_path, "experiment config file")->required();
  cmd_gen->add_option("--out", out_dir, "output directory override");

  std::string checkpoint_path;
  std::string data_path;
  CLI::App* cmd_eval = app.add_subcommand("eval", "score a checkpoint on a dataset");
  cmd_eval->add_option("--checkpoint", checkpoint_path, "saved model")->required();
  cmd_eval->add_option("--data", data_path, "saved dataset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? lend::exit_ok : lend::exit_config;
  }

  lend::ExperimentOverrides overrides;
  overrides.out_dir = out_dir;
  overrides.seed = seed;

  if (cmd_run->parsed()) return lend::run_experiment(config_path, overrides);
  if (cmd_gen->parsed()) return lend::generate_datasets(config_path, overrides);
  return lend::evaluate_checkpoint(checkpoint_path, data_path);
}
