#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "lend/config.hpp"
#include "lend/dataset.hpp"

namespace lend {

struct ExperimentOverrides {
  std::string out_dir;                // replaces the configured out_dir when set
  std::optional<std::uint64_t> seed;  // replaces the configured training seed
};

// Materializes the train/test pair a config describes: loads the files in
// file mode, synthesizes clusters otherwise, and injects noise into the
// training labels only.
std::pair<LabeledDataset, LabeledDataset> prepare_datasets(const ExperimentConfig& cfg);

// Trains every configured method, writes per-method metric CSVs and final
// checkpoints under the output directory, and prints a best/last summary
// table. Returns a process exit code.
int run_experiment(const std::string& config_path, const ExperimentOverrides& ov = {});

// Writes the synthetic train/test pair a config describes to disk.
int generate_datasets(const std::string& config_path, const ExperimentOverrides& ov = {});

// Scores a saved checkpoint against a saved dataset.
int evaluate_checkpoint(const std::string& checkpoint_path, const std::string& data_path);

}  // namespace lend
