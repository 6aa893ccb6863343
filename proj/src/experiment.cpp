#include "lend/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lend/errors.hpp"
#include "lend/metrics.hpp"
#include "lend/rng.hpp"
#include "lend/trainer.hpp"

namespace lend {

namespace {

NoiseSpec noise_spec_from_config(const ExperimentConfig& cfg, int num_classes) {
  if (cfg.noise.kind == "symmetric") {
    return make_symmetric_spec(num_classes, cfg.noise.rate, cfg.noise.seed);
  }
  const std::vector<int> partners =
      cfg.noise.partners.empty() ? default_partners(num_classes) : cfg.noise.partners;
  return make_asymmetric_spec(num_classes, cfg.noise.rate, partners, cfg.noise.seed);
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) {
    throw Error(ErrCode::io_failure,
                "cannot create output directory '" + path + "': " + ec.message());
  }
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> prepare_datasets(const ExperimentConfig& cfg) {
  LabeledDataset train, test;
  if (!cfg.train_path.empty()) {
    train = load_dataset(cfg.train_path);
    test = load_dataset(cfg.test_path);
  } else {
    const auto& s = cfg.synthetic;
    train = make_gaussian_clusters(s.classes, s.train_per_class, s.dim, s.separation,
                                   s.spread, s.seed);
    const std::uint64_t test_seed = rng::keyed(s.seed, rng::kDerive, 1);
    test = make_gaussian_clusters(s.classes, s.test_per_class, s.dim, s.separation,
                                  s.spread, test_seed);
    if (cfg.noise.kind != "none") {
      train = inject_noise(train, noise_spec_from_config(cfg, train.num_classes));
    }
  }
  train.split = Split::train;
  test.split = Split::test;
  return {std::move(train), std::move(test)};
}

int run_experiment(const std::string& config_path, const ExperimentOverrides& ov) {
  return guarded([&] {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (ov.seed) cfg.train.seed = *ov.seed;

    const auto [train, test] = prepare_datasets(cfg);
    ensure_dir(cfg.out_dir);

    std::printf("%-10s %-8s %-6s %-8s\n", "method", "best", "epoch", "last10");
    for (Method method : cfg.methods) {
      TrainConfig tcfg = cfg.train;
      tcfg.method = method;
      const std::string prefix = cfg.out_dir + "/" + method_name(method);

      EpochCallback callback;
      if (cfg.snapshots && method == Method::lend) {
        callback = [&prefix](const EpochMetrics& m, const DilutedLabelStore& store,
                             const ClassifierModel&) {
          std::ofstream snap(prefix + "_store_epoch_" + std::to_string(m.epoch) + ".csv");
          if (snap) store.write_snapshot(snap);
        };
      }

      const RunResult result = run(train, test, tcfg, callback);
      write_history_csv(result.history, prefix + "_metrics.csv");
      save_checkpoint(result.model, prefix + "_final.ckpt");

      const MethodSummary summary = summarize(result.history);
      std::printf("%-10s %-8.4f %-6d %-8.4f\n", method_name(method),
                  summary.best_accuracy, summary.best_epoch, summary.last_accuracy);
    }
    return exit_ok;
  });
}

int generate_datasets(const std::string& config_path, const ExperimentOverrides& ov) {
  return guarded([&] {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (!cfg.train_path.empty()) {
      throw Error(ErrCode::bad_config,
                  "config points at dataset files; nothing to generate");
    }
    const auto [train, test] = prepare_datasets(cfg);
    ensure_dir(cfg.out_dir);
    const std::string train_path = cfg.out_dir + "/train.ds";
    const std::string test_path = cfg.out_dir + "/test.ds";
    save_dataset(train, train_path);
    save_dataset(test, test_path);
    std::printf("wrote %s (%zu examples)\n", train_path.c_str(), train.size());
    std::printf("wrote %s (%zu examples)\n", test_path.c_str(), test.size());
    return exit_ok;
  });
}

int evaluate_checkpoint(const std::string& checkpoint_path, const std::string& data_path) {
  return guarded([&] {
    const ClassifierModel model = load_checkpoint(checkpoint_path);
    const LabeledDataset ds = load_dataset(data_path);
    if (ds.input_dim() != static_cast<std::size_t>(model.input_dim) ||
        ds.num_classes != model.num_classes) {
      throw Error(ErrCode::dimension_mismatch,
                  "checkpoint and dataset disagree on shape");
    }
    const std::vector<int> predicted = predict_labels(model, ds.features);
    long clean_hits = 0, noisy_hits = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (predicted[i] == ds.clean_labels[i]) ++clean_hits;
      if (predicted[i] == ds.noisy_labels[i]) ++noisy_hits;
    }
    const double n = static_cast<double>(ds.size());
    std::printf("examples: %zu\n", ds.size());
    std::printf("accuracy_clean: %.6f\n", clean_hits / n);
    std::printf("accuracy_noisy: %.6f\n", noisy_hits / n);
    return exit_ok;
  });
}

}  // namespace lend
