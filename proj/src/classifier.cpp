#include "lend/classifier.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lend/errors.hpp"
#include "lend/rng.hpp"
#include "lend/text.hpp"

namespace lend {

namespace {

// Uniform in (-bound, bound) with bound = 1 / sqrt(fan_in).
void fill_fan_in(Matrix& w, std::uint64_t seed, std::uint64_t& counter) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
  for (double& v : w.data()) {
    v = (2.0 * rng::keyed_uniform(seed, rng::kModelInit, counter++) - 1.0) * bound;
  }
}

void check_shapes(const ClassifierModel& model) {
  if (model.input_dim < 1 || model.embedding_dim < 1 || model.num_classes < 2) {
    throw Error(ErrCode::bad_argument,
                "model needs positive dimensions and at least 2 classes");
  }
  const auto d_in = static_cast<std::size_t>(model.input_dim);
  const auto d = static_cast<std::size_t>(model.embedding_dim);
  const auto c = static_cast<std::size_t>(model.num_classes);
  if (model.w1.rows() != d || model.w1.cols() != d_in || model.b1.size() != d ||
      model.w2.rows() != c || model.w2.cols() != d || model.b2.size() != c) {
    throw Error(ErrCode::dimension_mismatch, "model parameter shapes are inconsistent");
  }
}

}  // namespace

ClassifierModel ClassifierModel::init(int input_dim, int embedding_dim, int num_classes,
                                      std::uint64_t seed) {
  if (input_dim < 1 || embedding_dim < 1) {
    throw Error(ErrCode::bad_argument, "model dimensions must be positive");
  }
  if (num_classes < 2) {
    throw Error(ErrCode::bad_class_count,
                "classifier needs at least 2 classes, got " +
                    std::to_string(num_classes));
  }
  ClassifierModel model;
  model.input_dim = input_dim;
  model.embedding_dim = embedding_dim;
  model.num_classes = num_classes;
  model.w1 = Matrix(embedding_dim, input_dim);
  model.b1.assign(embedding_dim, 0.0);
  model.w2 = Matrix(num_classes, embedding_dim);
  model.b2.assign(num_classes, 0.0);
  std::uint64_t counter = 0;
  fill_fan_in(model.w1, seed, counter);
  fill_fan_in(model.w2, seed, counter);
  return model;
}

ForwardResult forward(const ClassifierModel& model, const Matrix& batch) {
  check_shapes(model);
  if (batch.cols() != static_cast<std::size_t>(model.input_dim)) {
    throw Error(ErrCode::dimension_mismatch,
                "batch has " + std::to_string(batch.cols()) +
                    " features but the model expects " +
                    std::to_string(model.input_dim));
  }
  if (!batch.all_finite()) {
    throw Error(ErrCode::non_finite, "batch contains a non-finite value");
  }

  const std::size_t n = batch.rows();
  const std::size_t d = model.embedding_dim;
  const std::size_t c_count = model.num_classes;

  ForwardResult out;
  out.preactivations = Matrix(n, d);
  out.embeddings = Matrix(n, d);
  out.logits = Matrix(n, c_count);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < d; ++h) {
      double pre = model.b1[h];
      for (std::size_t f = 0; f < batch.cols(); ++f) {
        pre += model.w1(h, f) * batch(i, f);
      }
      out.preactivations(i, h) = pre;
      out.embeddings(i, h) = pre > 0.0 ? pre : 0.0;
    }
    for (std::size_t j = 0; j < c_count; ++j) {
      double logit = model.b2[j];
      for (std::size_t h = 0; h < d; ++h) {
        logit += model.w2(j, h) * out.embeddings(i, h);
      }
      out.logits(i, j) = logit;
    }
  }
  return out;
}

Matrix embed(const ClassifierModel& model, const Matrix& batch) {
  return forward(model, batch).embeddings;
}

LossResult weighted_loss(const Matrix& logits, std::span<const int> labels,
                         std::span<const int> weights) {
  const std::size_t n = logits.rows();
  const std::size_t c_count = logits.cols();
  if (labels.size() != n || weights.size() != n) {
    throw Error(ErrCode::dimension_mismatch,
                "labels and weights must match the logit row count");
  }

  LossResult result;
  result.dlogits = Matrix(n, c_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] != 0 && weights[i] != 1) {
      throw Error(ErrCode::bad_argument, "selection weights must be 0 or 1");
    }
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c_count) {
      throw Error(ErrCode::label_out_of_range,
                  "label at row " + std::to_string(i) + " outside [0, C)");
    }
    if (weights[i] == 0) continue;

    const auto row = logits.row(i);
    double peak = row[0];
    for (double v : row) peak = std::max(peak, v);
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - peak);
    const double lse = peak + std::log(sum);
    result.loss += lse - row[labels[i]];
    for (std::size_t j = 0; j < c_count; ++j) {
      result.dlogits(i, j) = std::exp(row[j] - lse) - (static_cast<int>(j) == labels[i] ? 1.0 : 0.0);
    }
  }
  if (!std::isfinite(result.loss)) {
    throw Error(ErrCode::non_finite, "loss is non-finite");
  }
  return result;
}

ModelGradients ModelGradients::zeros_like(const ClassifierModel& model) {
  ModelGradients g;
  g.w1 = Matrix(model.w1.rows(), model.w1.cols(), 0.0);
  g.b1.assign(model.b1.size(), 0.0);
  g.w2 = Matrix(model.w2.rows(), model.w2.cols(), 0.0);
  g.b2.assign(model.b2.size(), 0.0);
  return g;
}

void ModelGradients::scale(double factor) {
  for (double& v : w1.data()) v *= factor;
  for (double& v : b1) v *= factor;
  for (double& v : w2.data()) v *= factor;
  for (double& v : b2) v *= factor;
}

ModelGradients backward(const ClassifierModel& model, const Matrix& batch,
                        const ForwardResult& fwd, const Matrix& dlogits) {
  check_shapes(model);
  const std::size_t n = batch.rows();
  const std::size_t d = model.embedding_dim;
  const std::size_t c_count = model.num_classes;
  if (fwd.embeddings.rows() != n || dlogits.rows() != n ||
      dlogits.cols() != c_count ||
      batch.cols() != static_cast<std::size_t>(model.input_dim)) {
    throw Error(ErrCode::dimension_mismatch, "backward inputs disagree on shape");
  }

  ModelGradients grads = ModelGradients::zeros_like(model);
  std::vector<double> dhidden(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c_count; ++j) {
      const double g = dlogits(i, j);
      grads.b2[j] += g;
      for (std::size_t h = 0; h < d; ++h) {
        grads.w2(j, h) += g * fwd.embeddings(i, h);
      }
    }
    for (std::size_t h = 0; h < d; ++h) {
      double g = 0.0;
      for (std::size_t j = 0; j < c_count; ++j) {
        g += dlogits(i, j) * model.w2(j, h);
      }
      dhidden[h] = fwd.preactivations(i, h) > 0.0 ? g : 0.0;
    }
    for (std::size_t h = 0; h < d; ++h) {
      const double g = dhidden[h];
      if (g == 0.0) continue;
      grads.b1[h] += g;
      for (std::size_t f = 0; f < batch.cols(); ++f) {
        grads.w1(h, f) += g * batch(i, f);
      }
    }
  }
  return grads;
}

double learning_rate(const OptimizerState& opt, int epoch) {
  if (!(opt.lr_init > 0.0) || !(opt.lr_decay_factor > 0.0)) {
    throw Error(ErrCode::bad_argument, "learning-rate schedule must be positive");
  }
  return epoch < opt.lr_decay_epoch ? opt.lr_init : opt.lr_init / opt.lr_decay_factor;
}

void sgd_step(ClassifierModel& model, const ModelGradients& grads, OptimizerState& opt,
              int epoch) {
  check_shapes(model);
  if (grads.w1.rows() != model.w1.rows() || grads.w1.cols() != model.w1.cols() ||
      grads.w2.rows() != model.w2.rows() || grads.w2.cols() != model.w2.cols() ||
      grads.b1.size() != model.b1.size() || grads.b2.size() != model.b2.size()) {
    throw Error(ErrCode::dimension_mismatch, "gradient shapes disagree with the model");
  }
  if (!grads.w1.all_finite() || !grads.w2.all_finite()) {
    throw Error(ErrCode::non_finite, "gradient contains a non-finite value");
  }
  if (opt.velocity.w1.empty()) {
    opt.velocity = ModelGradients::zeros_like(model);
  }

  const double lr = learning_rate(opt, epoch);
  auto apply = [&](std::vector<double>& theta, std::vector<double>& v,
                   const std::vector<double>& g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = opt.momentum * v[i] + g[i];
      theta[i] -= lr * (v[i] + opt.weight_decay * theta[i]);
    }
  };
  apply(model.w1.data(), opt.velocity.w1.data(), grads.w1.data());
  apply(model.b1, opt.velocity.b1, grads.b1);
  apply(model.w2.data(), opt.velocity.w2.data(), grads.w2.data());
  apply(model.b2, opt.velocity.b2, grads.b2);
}

void save_checkpoint(const ClassifierModel& model, const std::string& path) {
  check_shapes(model);
  std::ofstream out(path);
  if (!out) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for writing");
  out << "LEND-CKPT v1 d_in=" << model.input_dim << " d=" << model.embedding_dim
      << " c=" << model.num_classes << "\n";
  auto write_all = [&](const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i ? " " : "") << format_double(values[i]);
    }
    out << "\n";
  };
  write_all(model.w1.data());
  write_all(model.b1);
  write_all(model.w2.data());
  write_all(model.b2);
  if (!out) throw Error(ErrCode::io_failure, "short write to '" + path + "'");
}

ClassifierModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrCode::io_failure, "cannot open '" + path + "' for reading");
  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrCode::malformed_header, "'" + path + "' is empty");
  }
  int d_in = 0, d = 0, c = 0;
  if (std::sscanf(header.c_str(), "LEND-CKPT v1 d_in=%d d=%d c=%d", &d_in, &d, &c) != 3) {
    throw Error(ErrCode::malformed_header, "'" + path + "': bad header '" + header + "'");
  }
  if (d_in < 1 || d < 1 || c < 2) {
    throw Error(ErrCode::malformed_header,
                "'" + path + "': header dimensions out of range");
  }

  ClassifierModel model;
  model.input_dim = d_in;
  model.embedding_dim = d;
  model.num_classes = c;
  model.w1 = Matrix(d, d_in);
  model.b1.assign(d, 0.0);
  model.w2 = Matrix(c, d);
  model.b2.assign(c, 0.0);

  auto read_all = [&](std::vector<double>& values, const char* what) {
    for (double& v : values) {
      if (!(in >> v)) {
        throw Error(ErrCode::dimension_mismatch,
                    "'" + path + "': too few values for " + what);
      }
    }
  };
  read_all(model.w1.data(), "the embedding weights");
  read_all(model.b1, "the embedding bias");
  read_all(model.w2.data(), "the head weights");
  read_all(model.b2, "the head bias");
  double extra;
  if (in >> extra) {
    throw Error(ErrCode::dimension_mismatch,
                "'" + path + "': trailing values beyond the declared shape");
  }
  return model;
}

}  // namespace lend
