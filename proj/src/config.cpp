#include "lend/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lend/errors.hpp"
#include "lend/text.hpp"

namespace lend {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw Error(ErrCode::bad_config, origin + ": " + message);
}

long to_long(const std::string& value, const std::string& origin, const std::string& key) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') fail(origin, "key '" + key + "' needs an integer");
  return v;
}

std::uint64_t to_u64(const std::string& value, const std::string& origin,
                     const std::string& key) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || value.front() == '-') {
    fail(origin, "key '" + key + "' needs a nonnegative integer");
  }
  return v;
}

double to_double(const std::string& value, const std::string& origin,
                 const std::string& key) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') fail(origin, "key '" + key + "' needs a number");
  return v;
}

bool to_bool(const std::string& value, const std::string& origin, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(origin, "key '" + key + "' needs true or false");
}

std::vector<int> to_int_list(const std::string& value, const std::string& origin,
                             const std::string& key) {
  std::vector<int> out;
  std::istringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    out.push_back(static_cast<int>(to_long(trim(item), origin, key)));
  }
  if (out.empty()) fail(origin, "key '" + key + "' needs a comma-separated list");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;

  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (value.empty()) fail(where, "key '" + key + "' has no value");

    if (key == "train_data") {
      cfg.train_path = value;
    } else if (key == "test_data") {
      cfg.test_path = value;
    } else if (key == "classes") {
      cfg.synthetic.classes = static_cast<int>(to_long(value, where, key));
    } else if (key == "dim") {
      cfg.synthetic.dim = static_cast<int>(to_long(value, where, key));
    } else if (key == "train_per_class") {
      cfg.synthetic.train_per_class = static_cast<int>(to_long(value, where, key));
    } else if (key == "test_per_class") {
      cfg.synthetic.test_per_class = static_cast<int>(to_long(value, where, key));
    } else if (key == "separation") {
      cfg.synthetic.separation = to_double(value, where, key);
    } else if (key == "spread") {
      cfg.synthetic.spread = to_double(value, where, key);
    } else if (key == "data_seed") {
      cfg.synthetic.seed = to_u64(value, where, key);
    } else if (key == "noise_kind") {
      if (value != "symmetric" && value != "asymmetric" && value != "none") {
        fail(where, "noise_kind must be symmetric, asymmetric, or none");
      }
      cfg.noise.kind = value;
    } else if (key == "noise_rate") {
      cfg.noise.rate = to_double(value, where, key);
    } else if (key == "noise_seed") {
      cfg.noise.seed = to_u64(value, where, key);
    } else if (key == "partners") {
      cfg.noise.partners = to_int_list(value, where, key);
    } else if (key == "methods") {
      cfg.methods.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        item = trim(item);
        try {
          cfg.methods.push_back(method_from_name(item));
        } catch (const Error&) {
          fail(where, "unknown method '" + item + "'");
        }
      }
      if (cfg.methods.empty()) fail(where, "methods list is empty");
    } else if (key == "epochs") {
      cfg.train.max_epochs = static_cast<int>(to_long(value, where, key));
    } else if (key == "batch_size") {
      cfg.train.batch_size = static_cast<int>(to_long(value, where, key));
    } else if (key == "k") {
      cfg.train.k = static_cast<int>(to_long(value, where, key));
    } else if (key == "alpha") {
      cfg.train.alpha = to_double(value, where, key);
    } else if (key == "beta") {
      cfg.train.beta = to_double(value, where, key);
    } else if (key == "gamma") {
      cfg.train.gamma = to_double(value, where, key);
    } else if (key == "iterations") {
      cfg.train.iterations = static_cast<int>(to_long(value, where, key));
    } else if (key == "tol") {
      cfg.train.tol = to_double(value, where, key);
    } else if (key == "warmup_epochs") {
      cfg.train.warmup_epochs = static_cast<int>(to_long(value, where, key));
    } else if (key == "embedding_dim") {
      cfg.train.embedding_dim = static_cast<int>(to_long(value, where, key));
    } else if (key == "lr") {
      cfg.train.lr_init = to_double(value, where, key);
    } else if (key == "lr_decay_epoch") {
      cfg.train.lr_decay_epoch = static_cast<int>(to_long(value, where, key));
    } else if (key == "lr_decay_factor") {
      cfg.train.lr_decay_factor = to_double(value, where, key);
    } else if (key == "sgd_momentum") {
      cfg.train.sgd_momentum = to_double(value, where, key);
    } else if (key == "weight_decay") {
      cfg.train.weight_decay = to_double(value, where, key);
    } else if (key == "seed") {
      cfg.train.seed = to_u64(value, where, key);
    } else if (key == "epoch_momentum") {
      cfg.train.epoch_momentum = to_bool(value, where, key);
    } else if (key == "snapshots") {
      cfg.snapshots = to_bool(value, where, key);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      fail(where, "unknown key '" + key + "'");
    }
  }

  if (cfg.train_path.empty() != cfg.test_path.empty()) {
    fail(origin, "train_data and test_data must be given together");
  }
  if (cfg.train_path.empty()) {
    if (cfg.synthetic.classes < 2) fail(origin, "classes must be at least 2");
    if (cfg.synthetic.dim < 1) fail(origin, "dim must be positive");
    if (cfg.synthetic.train_per_class < 1 || cfg.synthetic.test_per_class < 1) {
      fail(origin, "per-class example counts must be positive");
    }
    if (!(cfg.synthetic.separation > 0.0) || !(cfg.synthetic.spread > 0.0)) {
      fail(origin, "separation and spread must be positive");
    }
  }
  if (cfg.noise.kind != "none") {
    if (cfg.noise.rate < 0.0 || cfg.noise.rate >= 1.0) {
      fail(origin, "noise_rate must lie in [0, 1)");
    }
  }
  try {
    validate(cfg.train);
  } catch (const Error& e) {
    fail(origin, e.what());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrCode::bad_config, "cannot open config '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

}  // namespace lend
