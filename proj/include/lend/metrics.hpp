#pragma once

#include <span>
#include <string>
#include <vector>

#include "lend/classifier.hpp"
#include "lend/dataset.hpp"
#include "lend/dilution.hpp"

namespace lend {

struct EpochMetrics {
  int epoch = 0;
  double test_accuracy = 0.0;
  double diluted_label_accuracy = 0.0;    // diluted argmax vs clean, train set
  double predicted_label_accuracy = 0.0;  // model argmax vs clean, train set
  double selection_precision = 1.0;
  double selection_recall = 0.0;
  double selection_fraction = 0.0;
  double mean_loss = 0.0;  // selected cross-entropy per selected example
  double learning_rate = 0.0;

  // Raw counts behind the selection rates, over the examples visited
  // this epoch.
  long selected_count = 0;
  long clean_count = 0;
  long selected_and_clean = 0;
  long visited_count = 0;
  bool precision_defined = true;  // false when nothing was selected
};

// Fraction of store rows whose diluted argmax equals the clean label.
double diluted_accuracy(const DilutedLabelStore& store, std::span<const int> clean_labels);

// Model argmax per feature row; logit ties pick the smallest class.
std::vector<int> predict_labels(const ClassifierModel& model, const Matrix& features);

// Fraction of examples whose model argmax equals the clean label.
double predicted_accuracy(const ClassifierModel& model, const LabeledDataset& ds);

void write_history_csv(std::span<const EpochMetrics> history, const std::string& path);
std::vector<EpochMetrics> read_history_csv(const std::string& path);

struct MethodSummary {
  double best_accuracy = 0.0;  // max test accuracy over all epochs
  int best_epoch = -1;
  double last_accuracy = 0.0;  // mean test accuracy over the final ten epochs
};

MethodSummary summarize(std::span<const EpochMetrics> history);

}  // namespace lend
