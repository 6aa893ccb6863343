#include "lend/dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lend/errors.hpp"
#include "lend/rng.hpp"
#include "lend/text.hpp"

namespace lend {

namespace {

void check_labels(const std::vector<int>& labels, int num_classes, const char* which) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw Error(ErrCode::label_out_of_range,
                  std::string(which) + " label " + std::to_string(labels[i]) +
                      " at row " + std::to_string(i) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
}

}  // namespace

void validate(const LabeledDataset& ds) {
  const std::size_t n = ds.ids.size();
  if (n == 0) throw Error(ErrCode::empty_input, "dataset has no examples");
  if (ds.num_classes < 1) {
    throw Error(ErrCode::bad_class_count,
                "dataset needs at least one class, got " +
                    std::to_string(ds.num_classes));
  }
  if (ds.features.rows() != n || ds.clean_labels.size() != n ||
      ds.noisy_labels.size() != n) {
    throw Error(ErrCode::dimension_mismatch,
                "dataset columns disagree on example count");
  }
  std::vector<char> seen(n, 0);
  for (int id : ds.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= n || seen[id]) {
      throw Error(ErrCode::unknown_id,
                  "ids must be unique and dense in [0, n); offending id " +
                      std::to_string(id));
    }
    seen[id] = 1;
  }
  check_labels(ds.clean_labels, ds.num_classes, "clean");
  check_labels(ds.noisy_labels, ds.num_classes, "noisy");
}

NoiseSpec make_symmetric_spec(int num_classes, double rate, std::uint64_t seed) {
  if (num_classes < 2) {
    throw Error(ErrCode::bad_class_count,
                "symmetric noise needs at least 2 classes, got " +
                    std::to_string(num_classes));
  }
  if (rate < 0.0 || rate >= 1.0) {
    throw Error(ErrCode::bad_rate,
                "symmetric noise rate must lie in [0, 1), got " + format_double(rate));
  }
  NoiseSpec spec;
  spec.kind = NoiseKind::symmetric;
  spec.rate = rate;
  spec.rng_seed = seed;
  spec.transition = Matrix(num_classes, num_classes, rate / (num_classes - 1));
  for (int c = 0; c < num_classes; ++c) spec.transition(c, c) = 1.0 - rate;
  return spec;
}

std::vector<int> default_partners(int num_classes) {
  if (num_classes < 2) {
    throw Error(ErrCode::bad_class_count,
                "partner map needs at least 2 classes, got " +
                    std::to_string(num_classes));
  }
  std::vector<int> partners(num_classes);
  for (int c = 0; c < num_classes; ++c) partners[c] = (c + 1) % num_classes;
  return partners;
}

NoiseSpec make_asymmetric_spec(int num_classes, double rate,
                               const std::vector<int>& partners, std::uint64_t seed) {
  if (num_classes < 2) {
    throw Error(ErrCode::bad_class_count,
                "asymmetric noise needs at least 2 classes, got " +
                    std::to_string(num_classes));
  }
  if (rate < 0.0) {
    throw Error(ErrCode::bad_rate, "noise rate must be nonnegative, got " +
                                       format_double(rate));
  }
  if (rate >= 0.5) {
    throw Error(ErrCode::rate_majority,
                "asymmetric noise rate must stay below 0.5 so the clean label "
                "keeps the majority, got " +
                    format_double(rate));
  }
  if (partners.size() != static_cast<std::size_t>(num_classes)) {
    throw Error(ErrCode::dimension_mismatch,
                "partner map must list one target per class");
  }
  for (int c = 0; c < num_classes; ++c) {
    if (partners[c] < 0 || partners[c] >= num_classes) {
      throw Error(ErrCode::label_out_of_range,
                  "partner of class " + std::to_string(c) + " outside [0, C)");
    }
    if (partners[c] == c) {
      throw Error(ErrCode::partner_fixed_point,
                  "class " + std::to_string(c) + " is its own flip partner");
    }
  }
  NoiseSpec spec;
  spec.kind = NoiseKind::asymmetric;
  spec.rate = rate;
  spec.rng_seed = seed;
  spec.transition = Matrix(num_classes, num_classes, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    spec.transition(c, c) = 1.0 - rate;
    spec.transition(c, partners[c]) += rate;
  }
  return spec;
}

LabeledDataset inject_noise(const LabeledDataset& ds, const NoiseSpec& spec) {
  validate(ds);
  if (ds.num_classes != spec.num_classes()) {
    throw Error(ErrCode::dimension_mismatch,
                "noise spec covers " + std::to_string(spec.num_classes()) +
                    " classes but dataset has " + std::to_string(ds.num_classes));
  }
  LabeledDataset out = ds;
  const int c_count = ds.num_classes;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = spec.transition.row(ds.clean_labels[i]);
    const double u =
        rng::keyed_uniform(spec.rng_seed, rng::kNoise, static_cast<std::uint64_t>(ds.ids[i]));
    double cumulative = 0.0;
    int pick = c_count - 1;
    for (int j = 0; j < c_count; ++j) {
      cumulative += row[j];
      if (u < cumulative) {
        pick = j;
        break;
      }
    }
    out.noisy_labels[i] = pick;
  }
  return out;
}

LabeledDataset make_gaussian_clusters(int num_classes, int per_class, int dim,
                                      double separation, double spread,
                                      std::uint64_t seed) {
  if (num_classes < 1) {
    throw Error(ErrCode::bad_class_count,
                "need at least one class, got " + std::to_string(num_classes));
  }
  if (per_class < 1) {
    throw Error(ErrCode::bad_argument,
                "need at least one example per class, got " + std::to_string(per_class));
  }
  if (dim < 1) {
    throw Error(ErrCode::bad_argument, "feature dimension must be positive");
  }
  if (!(separation > 0.0) || !(spread > 0.0)) {
    throw Error(ErrCode::bad_argument, "separation and spread must be positive");
  }

  // Class centers sit on coordinate axes at radius separation * ring; rings
  // grow once the axes are exhausted, so all pairwise center distances are
  // at least `separation`.
  Matrix centers(num_classes, dim, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    const int axis = c % dim;
    const int ring = c / dim + 1;
    centers(c, axis) = separation * ring;
  }

  const std::size_t n = static_cast<std::size_t>(num_classes) * per_class;
  LabeledDataset ds;
  ds.ids.resize(n);
  ds.features = Matrix(n, dim);
  ds.clean_labels.resize(n);
  ds.noisy_labels.resize(n);
  ds.num_classes = num_classes;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i / per_class);
    ds.ids[i] = static_cast<int>(i);
    ds.clean_labels[i] = label;
    ds.noisy_labels[i] = label;
    for (int j = 0; j < dim; ++j) {
      const std::uint64_t counter = i * static_cast<std::uint64_t>(dim) + j;
      ds.features(i, j) =
          centers(label, j) + spread * rng::keyed_gaussian(seed, rng::kFeatures, counter);
    }
  }
  return ds;
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  validate(ds);
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for writing");
  out << "LEND-DS v1 n=" << ds.size() << " d=" << ds.input_dim()
      << " c=" << ds.num_classes << "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.ids[i] << ' ' << ds.clean_labels[i] << ' ' << ds.noisy_labels[i];
    for (double v : ds.features.row(i)) out << ' ' << format_double(v);
    out << "\n";
  }
  if (!out) throw Error(ErrCode::io_failure, "short write to '" + path + "'");
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for reading");

  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrCode::malformed_header, "'" + path + "' is empty");
  }
  std::uint64_t n = 0, d = 0, c = 0;
  if (std::sscanf(header.c_str(), "LEND-DS v1 n=%" SCNu64 " d=%" SCNu64 " c=%" SCNu64,
                  &n, &d, &c) != 3) {
    throw Error(ErrCode::malformed_header,
                "'" + path + "': bad header '" + header + "'");
  }
  if (n == 0 || d == 0 || c == 0) {
    throw Error(ErrCode::malformed_header,
                "'" + path + "': header dimensions must be positive");
  }

  LabeledDataset ds;
  ds.ids.resize(n);
  ds.features = Matrix(n, d);
  ds.clean_labels.resize(n);
  ds.noisy_labels.resize(n);
  ds.num_classes = static_cast<int>(c);

  std::string line;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrCode::row_length_mismatch,
                  "'" + path + "': file ends before row " + std::to_string(i));
    }
    std::istringstream row(line);
    std::vector<std::string> tokens;
    std::string token;
    while (row >> token) tokens.push_back(token);
    if (tokens.size() != 3 + d) {
      throw Error(ErrCode::row_length_mismatch,
                  "'" + path + "' row " + std::to_string(i) + ": expected " +
                      std::to_string(3 + d) + " fields, got " +
                      std::to_string(tokens.size()));
    }
    const char* ctx = "dataset row";
    ds.ids[i] = static_cast<int>(parse_long(tokens[0], ctx));
    ds.clean_labels[i] = static_cast<int>(parse_long(tokens[1], ctx));
    ds.noisy_labels[i] = static_cast<int>(parse_long(tokens[2], ctx));
    for (std::uint64_t j = 0; j < d; ++j) {
      ds.features(i, j) = parse_double(tokens[3 + j], ctx);
    }
  }
  validate(ds);
  return ds;
}

}  // namespace lend
