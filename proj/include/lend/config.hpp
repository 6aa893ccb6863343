#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lend/trainer.hpp"

namespace lend {

struct SyntheticSpec {
  int classes = 4;
  int dim = 16;
  int train_per_class = 500;
  int test_per_class = 250;
  double separation = 10.0;
  double spread = 1.0;
  std::uint64_t seed = 1;
};

struct NoiseConfig {
  std::string kind = "symmetric";  // symmetric | asymmetric | none
  double rate = 0.4;
  std::uint64_t seed = 7;
  std::vector<int> partners;  // asymmetric only; empty means cyclic
};

struct ExperimentConfig {
  // File-backed when both paths are set; synthetic otherwise.
  std::string train_path;
  std::string test_path;
  SyntheticSpec synthetic;
  NoiseConfig noise;
  std::vector<Method> methods = {Method::lend, Method::standard};
  TrainConfig train;
  std::string out_dir = "out";
  bool snapshots = false;
};

// Flat "key = value" file with '#' comments. Unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace lend
