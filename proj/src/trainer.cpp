#include "lend/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "lend/errors.hpp"
#include "lend/knn_graph.hpp"
#include "lend/rng.hpp"
#include "lend/text.hpp"

namespace lend {

const char* method_name(Method m) {
  return m == Method::lend ? "lend" : "standard";
}

Method method_from_name(const std::string& name) {
  if (name == "lend") return Method::lend;
  if (name == "standard") return Method::standard;
  throw Error(ErrCode::bad_config, "unknown method '" + name + "'");
}

void validate(const TrainConfig& cfg) {
  if (cfg.max_epochs < 0) {
    throw Error(ErrCode::bad_config, "max_epochs must be nonnegative");
  }
  if (cfg.batch_size < 2) {
    throw Error(ErrCode::bad_config, "batch_size must be at least 2");
  }
  if (cfg.k < 1) throw Error(ErrCode::bad_config, "k must be positive");
  if (!(cfg.alpha >= 0.0) || cfg.alpha >= 1.0) {
    throw Error(ErrCode::bad_config, "alpha must lie in [0, 1)");
  }
  if (cfg.beta < 0.0 || cfg.beta >= 1.0) {
    throw Error(ErrCode::bad_config, "beta must lie in [0, 1)");
  }
  if (!(cfg.gamma > 0.0)) throw Error(ErrCode::bad_config, "gamma must be positive");
  if (cfg.iterations < 1) {
    throw Error(ErrCode::bad_config, "iterations must be positive");
  }
  if (cfg.tol < 0.0) throw Error(ErrCode::bad_config, "tol must be nonnegative");
  if (cfg.warmup_epochs < 0) {
    throw Error(ErrCode::bad_config, "warmup_epochs must be nonnegative");
  }
  if (cfg.embedding_dim < 1) {
    throw Error(ErrCode::bad_config, "embedding_dim must be positive");
  }
  if (!(cfg.lr_init > 0.0)) throw Error(ErrCode::bad_config, "lr must be positive");
  if (cfg.lr_decay_epoch < 0) {
    throw Error(ErrCode::bad_config, "lr_decay_epoch must be nonnegative");
  }
  if (!(cfg.lr_decay_factor > 0.0)) {
    throw Error(ErrCode::bad_config, "lr_decay_factor must be positive");
  }
  if (cfg.sgd_momentum < 0.0 || cfg.sgd_momentum >= 1.0) {
    throw Error(ErrCode::bad_config, "sgd_momentum must lie in [0, 1)");
  }
  if (cfg.weight_decay < 0.0) {
    throw Error(ErrCode::bad_config, "weight_decay must be nonnegative");
  }
}

TrainView train_view(const LabeledDataset& ds) {
  validate(ds);
  TrainView view;
  view.ids = ds.ids;
  view.features = &ds.features;
  view.noisy_labels = ds.noisy_labels;
  view.num_classes = ds.num_classes;
  return view;
}

SelectionMask select(std::span<const int> noisy_labels, const DilutedLabelStore& store,
                     std::span<const int> batch_ids) {
  if (noisy_labels.size() != batch_ids.size()) {
    throw Error(ErrCode::dimension_mismatch,
                "label and id spans disagree on batch size");
  }
  SelectionMask mask;
  mask.weights.assign(batch_ids.size(), 0);
  for (std::size_t b = 0; b < batch_ids.size(); ++b) {
    if (store.diluted_argmax(batch_ids[b]) == noisy_labels[b]) {
      mask.weights[b] = 1;
      ++mask.selected;
    }
  }
  return mask;
}

namespace {

OptimizerState make_optimizer(const TrainConfig& cfg) {
  OptimizerState opt;
  opt.lr_init = cfg.lr_init;
  opt.lr_decay_epoch = cfg.lr_decay_epoch;
  opt.lr_decay_factor = cfg.lr_decay_factor;
  opt.momentum = cfg.sgd_momentum;
  opt.weight_decay = cfg.weight_decay;
  return opt;
}

}  // namespace

EpochRecord train_epoch(ClassifierModel& model, const TrainView& data,
                        DilutedLabelStore& store, OptimizerState& opt,
                        const TrainConfig& cfg, int epoch) {
  validate(cfg);
  const std::size_t n = data.size();
  if (n == 0) throw Error(ErrCode::empty_input, "nothing to train on");
  if (cfg.method == Method::lend &&
      (store.size() != n ||
       store.num_classes() != data.num_classes)) {
    throw Error(ErrCode::dimension_mismatch, "store does not cover the train view");
  }

  EpochRecord record;
  record.lr = learning_rate(opt, epoch);
  record.selected.assign(n, 0);
  record.visited.assign(n, 0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::SplitMix shuffler(rng::keyed(cfg.seed, rng::kShuffle, epoch));
  rng::shuffle(order, shuffler);

  const std::size_t batch_size = cfg.batch_size;
  const bool warmup = epoch < cfg.warmup_epochs;

  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, n);
    const std::size_t b_size = end - begin;
    const bool trailing = b_size < batch_size;
    if (trailing && b_size < static_cast<std::size_t>(cfg.k) + 1) break;
    if (b_size < 2) break;

    Matrix batch(b_size, data.features->cols());
    std::vector<int> batch_ids(b_size);
    std::vector<int> batch_labels(b_size);
    for (std::size_t b = 0; b < b_size; ++b) {
      const std::size_t src = order[begin + b];
      std::copy(data.features->row(src).begin(), data.features->row(src).end(),
                batch.row(b).begin());
      batch_ids[b] = data.ids[src];
      batch_labels[b] = data.noisy_labels[src];
    }

    const ForwardResult fwd = forward(model, batch);

    SelectionMask mask;
    if (cfg.method == Method::lend) {
      SimilarityGraph graph = build_similarity_graph(fwd.embeddings, cfg.k, cfg.gamma);
      graph.batch_ids = batch_ids;
      const Matrix z0 = init_batch(batch_labels, data.num_classes);
      const Matrix z =
          dilute(z0, graph.normalized, cfg.alpha, cfg.iterations, cfg.tol);
      if (cfg.epoch_momentum) {
        mask = select(batch_labels, store, batch_ids);
        store.momentum_update(batch_ids, z);
      } else {
        store.momentum_update(batch_ids, z);
        mask = select(batch_labels, store, batch_ids);
      }
    }
    if (cfg.method == Method::standard || warmup) {
      mask.weights.assign(b_size, 1);
      mask.selected = static_cast<int>(b_size);
    }

    const LossResult loss = weighted_loss(fwd.logits, batch_labels, mask.weights);
    ModelGradients grads = backward(model, batch, fwd, loss.dlogits);
    grads.scale(1.0 / std::max(1, mask.selected));
    sgd_step(model, grads, opt, epoch);

    record.loss_sum += loss.loss;
    record.selected_total += mask.selected;
    record.visited_total += static_cast<long>(b_size);
    ++record.batches;
    for (std::size_t b = 0; b < b_size; ++b) {
      record.visited[batch_ids[b]] = 1;
      if (mask.weights[b]) record.selected[batch_ids[b]] = 1;
    }
  }
  return record;
}

RunResult run(const LabeledDataset& train, const LabeledDataset& test,
              const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  validate(train);
  validate(test);
  if (train.num_classes < 2) {
    throw Error(ErrCode::bad_class_count, "training needs at least 2 classes");
  }
  if (train.input_dim() != test.input_dim() || train.num_classes != test.num_classes) {
    throw Error(ErrCode::dimension_mismatch,
                "train and test sets disagree on feature dimension or classes");
  }

  RunResult result;
  result.model = ClassifierModel::init(static_cast<int>(train.input_dim()),
                                       cfg.embedding_dim, train.num_classes, cfg.seed);
  result.store = DilutedLabelStore(train.noisy_labels, train.num_classes, cfg.alpha,
                                   cfg.beta, cfg.iterations, cfg.tol);
  OptimizerState opt = make_optimizer(cfg);
  const TrainView view = train_view(train);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const EpochRecord record =
        train_epoch(result.model, view, result.store, opt, cfg, epoch);

    EpochMetrics m;
    m.epoch = epoch;
    m.test_accuracy = predicted_accuracy(result.model, test);
    m.diluted_label_accuracy = diluted_accuracy(result.store, train.clean_labels);
    m.predicted_label_accuracy = predicted_accuracy(result.model, train);
    m.learning_rate = record.lr;
    m.visited_count = record.visited_total;
    m.selected_count = record.selected_total;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const int id = train.ids[i];
      if (!record.visited[id]) continue;
      const bool clean = train.noisy_labels[i] == train.clean_labels[i];
      if (clean) ++m.clean_count;
      if (record.selected[id] && clean) ++m.selected_and_clean;
    }
    if (record.selected_total > 0) {
      m.selection_precision = static_cast<double>(m.selected_and_clean) /
                              static_cast<double>(record.selected_total);
    } else {
      m.selection_precision = 1.0;
      m.precision_defined = false;
    }
    m.selection_recall =
        m.clean_count > 0
            ? static_cast<double>(m.selected_and_clean) / static_cast<double>(m.clean_count)
            : 1.0;
    m.selection_fraction =
        record.visited_total > 0
            ? static_cast<double>(record.selected_total) /
                  static_cast<double>(record.visited_total)
            : 0.0;
    m.mean_loss = record.selected_total > 0
                      ? record.loss_sum / static_cast<double>(record.selected_total)
                      : 0.0;

    result.history.push_back(m);
    if (on_epoch) on_epoch(m, result.store, result.model);
  }
  return result;
}

}  // namespace lend
