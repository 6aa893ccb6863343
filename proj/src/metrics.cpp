#include "lend/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lend/errors.hpp"
#include "lend/text.hpp"

namespace lend {

namespace {

constexpr const char* kHistoryHeader =
    "epoch,test_acc,train_diluted_acc,train_predicted_acc,sel_precision,"
    "sel_recall,sel_fraction,loss,lr";

}  // namespace

double diluted_accuracy(const DilutedLabelStore& store,
                        std::span<const int> clean_labels) {
  if (store.size() != clean_labels.size()) {
    throw Error(ErrCode::dimension_mismatch,
                "store and clean-label counts disagree");
  }
  if (store.size() == 0) {
    throw Error(ErrCode::empty_input, "store holds no examples");
  }
  long hits = 0;
  for (std::size_t id = 0; id < store.size(); ++id) {
    if (store.diluted_argmax(static_cast<int>(id)) == clean_labels[id]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(store.size());
}

std::vector<int> predict_labels(const ClassifierModel& model, const Matrix& features) {
  std::vector<int> labels(features.rows());
  constexpr std::size_t chunk = 512;
  for (std::size_t begin = 0; begin < features.rows(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, features.rows());
    Matrix block(end - begin, features.cols());
    for (std::size_t i = begin; i < end; ++i) {
      std::copy(features.row(i).begin(), features.row(i).end(),
                block.row(i - begin).begin());
    }
    const Matrix logits = forward(model, block).logits;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < logits.cols(); ++j) {
        if (logits(i, j) > logits(i, best)) best = j;
      }
      labels[begin + i] = static_cast<int>(best);
    }
  }
  return labels;
}

double predicted_accuracy(const ClassifierModel& model, const LabeledDataset& ds) {
  validate(ds);
  const std::vector<int> predicted = predict_labels(model, ds.features);
  long hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (predicted[i] == ds.clean_labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

void write_history_csv(std::span<const EpochMetrics> history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for writing");
  out << kHistoryHeader << "\n";
  for (const EpochMetrics& m : history) {
    out << m.epoch << ',' << format_double(m.test_accuracy) << ','
        << format_double(m.diluted_label_accuracy) << ','
        << format_double(m.predicted_label_accuracy) << ','
        << format_double(m.selection_precision) << ','
        << format_double(m.selection_recall) << ','
        << format_double(m.selection_fraction) << ',' << format_double(m.mean_loss)
        << ',' << format_double(m.learning_rate) << "\n";
  }
  if (!out) throw Error(ErrCode::io_failure, "short write to '" + path + "'");
}

std::vector<EpochMetrics> read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kHistoryHeader) {
    throw Error(ErrCode::malformed_header, "'" + path + "': bad metrics header");
  }
  std::vector<EpochMetrics> history;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 9) {
      throw Error(ErrCode::row_length_mismatch,
                  "'" + path + "': expected 9 metric fields, got " +
                      std::to_string(fields.size()));
    }
    EpochMetrics m;
    const char* ctx = "metrics row";
    m.epoch = static_cast<int>(parse_long(fields[0], ctx));
    m.test_accuracy = parse_double(fields[1], ctx);
    m.diluted_label_accuracy = parse_double(fields[2], ctx);
    m.predicted_label_accuracy = parse_double(fields[3], ctx);
    m.selection_precision = parse_double(fields[4], ctx);
    m.selection_recall = parse_double(fields[5], ctx);
    m.selection_fraction = parse_double(fields[6], ctx);
    m.mean_loss = parse_double(fields[7], ctx);
    m.learning_rate = parse_double(fields[8], ctx);
    history.push_back(m);
  }
  return history;
}

MethodSummary summarize(std::span<const EpochMetrics> history) {
  MethodSummary summary;
  if (history.empty()) return summary;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (summary.best_epoch < 0 || history[i].test_accuracy > summary.best_accuracy) {
      summary.best_accuracy = history[i].test_accuracy;
      summary.best_epoch = history[i].epoch;
    }
  }
  const std::size_t tail = std::min<std::size_t>(10, history.size());
  double sum = 0.0;
  for (std::size_t i = history.size() - tail; i < history.size(); ++i) {
    sum += history[i].test_accuracy;
  }
  summary.last_accuracy = sum / static_cast<double>(tail);
  return summary;
}

}  // namespace lend
