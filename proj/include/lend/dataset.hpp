#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lend/matrix.hpp"

namespace lend {

enum class Split { train, test };

// Fixed-size collection of feature vectors carrying both the clean label
// and the (possibly corrupted) noisy label per example. Ids are dense in
// [0, n) and stable for the lifetime of the dataset.
struct LabeledDataset {
  std::vector<int> ids;
  Matrix features;  // n x input_dim
  std::vector<int> clean_labels;
  std::vector<int> noisy_labels;
  int num_classes = 0;
  Split split = Split::train;

  std::size_t size() const { return ids.size(); }
  std::size_t input_dim() const { return features.cols(); }

  // The split tag is in-memory bookkeeping and not part of dataset value.
  bool operator==(const LabeledDataset& other) const {
    return ids == other.ids && features == other.features &&
           clean_labels == other.clean_labels && noisy_labels == other.noisy_labels &&
           num_classes == other.num_classes;
  }
};

// Throws Error when any structural invariant is broken.
void validate(const LabeledDataset& ds);

enum class NoiseKind { symmetric, asymmetric };

// Row-stochastic label transition matrix: transition(i, j) is the
// probability that clean class i is observed as class j.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::symmetric;
  double rate = 0.0;
  Matrix transition;  // C x C
  std::uint64_t rng_seed = 0;

  int num_classes() const { return static_cast<int>(transition.rows()); }
};

NoiseSpec make_symmetric_spec(int num_classes, double rate, std::uint64_t seed);

// Cyclic partner map i -> (i + 1) mod C.
std::vector<int> default_partners(int num_classes);

NoiseSpec make_asymmetric_spec(int num_classes, double rate,
                               const std::vector<int>& partners, std::uint64_t seed);

// Resamples the noisy labels from the transition row of each clean label.
// Uses one keyed draw per example id, so the result does not depend on
// storage order. Clean labels are never modified.
LabeledDataset inject_noise(const LabeledDataset& ds, const NoiseSpec& spec);

// Synthetic benchmark data: C axis-aligned Gaussian clusters whose centers
// are at least `separation` apart. Labels are grouped by class and clean
// equals noisy until noise is injected.
LabeledDataset make_gaussian_clusters(int num_classes, int per_class, int dim,
                                      double separation, double spread,
                                      std::uint64_t seed);

void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

}  // namespace lend
