#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lend/classifier.hpp"
#include "lend/dataset.hpp"
#include "lend/dilution.hpp"
#include "lend/metrics.hpp"

namespace lend {

enum class Method { lend, standard };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct TrainConfig {
  Method method = Method::lend;
  int max_epochs = 100;
  int batch_size = 256;
  int k = 8;
  double alpha = 0.99;      // dilution strength
  double beta = 0.9;        // label-mass momentum
  double gamma = 3.0;       // affinity sharpening exponent
  int iterations = 10;      // dilution rounds per batch
  double tol = 1e-6;        // dilution early-stop threshold, 0 disables
  int warmup_epochs = 5;    // epochs trained on every example
  int embedding_dim = 64;
  double lr_init = 0.05;
  int lr_decay_epoch = 50;
  double lr_decay_factor = 10.0;
  double sgd_momentum = 0.9;
  double weight_decay = 0.0005;
  std::uint64_t seed = 1;
  // When set, selection reads the store as it stood at the end of the
  // previous epoch instead of right after the current batch's update.
  bool epoch_momentum = false;
};

void validate(const TrainConfig& cfg);

// Training-path view of a dataset. Clean labels are deliberately absent:
// only the evaluation side may read them.
struct TrainView {
  std::span<const int> ids;
  const Matrix* features = nullptr;
  std::span<const int> noisy_labels;
  int num_classes = 0;

  std::size_t size() const { return ids.size(); }
};

TrainView train_view(const LabeledDataset& ds);

struct SelectionMask {
  std::vector<int> weights;  // 0/1 per batch position
  int selected = 0;
};

// Keeps exactly the examples whose noisy label agrees with the diluted
// argmax of their store row.
SelectionMask select(std::span<const int> noisy_labels, const DilutedLabelStore& store,
                     std::span<const int> batch_ids);

struct EpochRecord {
  double loss_sum = 0.0;  // summed selected cross-entropy
  double lr = 0.0;
  long selected_total = 0;
  long visited_total = 0;
  long batches = 0;
  std::vector<std::uint8_t> selected;  // indexed by example id
  std::vector<std::uint8_t> visited;
};

// One pass over the data in shuffled order. The shuffle is a pure
// function of (cfg.seed, epoch). A trailing batch smaller than
// batch_size is trained only when it still supports the graph (at least
// k + 1 examples).
EpochRecord train_epoch(ClassifierModel& model, const TrainView& data,
                        DilutedLabelStore& store, OptimizerState& opt,
                        const TrainConfig& cfg, int epoch);

using EpochCallback = std::function<void(const EpochMetrics&, const DilutedLabelStore&,
                                         const ClassifierModel&)>;

struct RunResult {
  std::vector<EpochMetrics> history;
  ClassifierModel model;
  DilutedLabelStore store;
};

// Full training run: initializes the model from cfg.seed, trains
// max_epochs epochs, and evaluates after each one. Clean labels are used
// only here, to score the epoch.
RunResult run(const LabeledDataset& train, const LabeledDataset& test,
              const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace lend
