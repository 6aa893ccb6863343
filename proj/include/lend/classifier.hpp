#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lend/matrix.hpp"

namespace lend {

// Two-layer perceptron: affine -> ramp (the embedding layer) -> affine
// soft-max head. Weights are stored row-major as (out x in).
struct ClassifierModel {
  int input_dim = 0;
  int embedding_dim = 0;
  int num_classes = 0;
  Matrix w1;               // embedding_dim x input_dim
  std::vector<double> b1;  // embedding_dim
  Matrix w2;               // num_classes x embedding_dim
  std::vector<double> b2;  // num_classes

  // Fan-in scaled uniform weights, zero biases, fully determined by seed.
  static ClassifierModel init(int input_dim, int embedding_dim, int num_classes,
                              std::uint64_t seed);

  bool operator==(const ClassifierModel&) const = default;
};

struct ForwardResult {
  Matrix preactivations;  // |B| x embedding_dim, kept for the backward pass
  Matrix embeddings;      // |B| x embedding_dim, post-activation
  Matrix logits;          // |B| x num_classes
};

ForwardResult forward(const ClassifierModel& model, const Matrix& batch);

// Embedding rows only; equals forward(model, batch).embeddings.
Matrix embed(const ClassifierModel& model, const Matrix& batch);

struct LossResult {
  double loss = 0.0;  // summed over the selected examples
  Matrix dlogits;     // exactly-zero rows for unselected examples
};

// Cross-entropy of soft-max(logits) at the given labels, gated by binary
// per-example weights. Selecting nothing yields zero loss and gradient.
LossResult weighted_loss(const Matrix& logits, std::span<const int> labels,
                         std::span<const int> weights);

struct ModelGradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;

  static ModelGradients zeros_like(const ClassifierModel& model);
  void scale(double factor);
};

ModelGradients backward(const ClassifierModel& model, const Matrix& batch,
                        const ForwardResult& fwd, const Matrix& dlogits);

struct OptimizerState {
  double lr_init = 0.05;
  int lr_decay_epoch = 50;
  double lr_decay_factor = 10.0;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  ModelGradients velocity;  // sized lazily on the first step
};

// Step size used at the given epoch: lr_init before the decay epoch,
// lr_init / lr_decay_factor from it onward.
double learning_rate(const OptimizerState& opt, int epoch);

// v <- momentum * v + g; theta <- theta - lr * (v + weight_decay * theta).
void sgd_step(ClassifierModel& model, const ModelGradients& grads, OptimizerState& opt,
              int epoch);

void save_checkpoint(const ClassifierModel& model, const std::string& path);
ClassifierModel load_checkpoint(const std::string& path);

}  // namespace lend
