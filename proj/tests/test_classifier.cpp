#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lend/classifier.hpp"
#include "lend/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lend;
using testutil::code_of;

namespace {

ClassifierModel hand_model() {
  ClassifierModel m;
  m.input_dim = 2;
  m.embedding_dim = 2;
  m.num_classes = 2;
  m.w1 = Matrix(2, 2);
  m.w1(0, 0) = 1.0;
  m.w1(0, 1) = 2.0;
  m.w1(1, 0) = -1.0;
  m.w1(1, 1) = 0.5;
  m.b1 = {0.5, -1.0};
  m.w2 = Matrix(2, 2);
  m.w2(0, 0) = 0.25;
  m.w2(0, 1) = -1.0;
  m.w2(1, 0) = 2.0;
  m.w2(1, 1) = 0.5;
  m.b2 = {0.1, -0.2};
  return m;
}

// Deterministic batch kept away from the ramp kinks so finite
// differences stay trustworthy.
Matrix kink_free_batch(const ClassifierModel& model, std::size_t rows,
                       std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const Matrix batch =
        oracle::random_matrix(rows, model.input_dim, seed + 7919 * attempt);
    const ForwardResult fwd = forward(model, batch);
    double closest = 1e9;
    for (double v : fwd.preactivations.data()) closest = std::min(closest, std::abs(v));
    if (closest > 1e-3) return batch;
  }
}

}  // namespace

TEST_CASE("initialization is seeded, zero-biased, and fan-in bounded") {
  const ClassifierModel a = ClassifierModel::init(16, 64, 4, 9);
  const ClassifierModel b = ClassifierModel::init(16, 64, 4, 9);
  CHECK(a == b);
  const ClassifierModel c = ClassifierModel::init(16, 64, 4, 10);
  CHECK(a.w1 != c.w1);

  for (double v : a.b1) CHECK(v == 0.0);
  for (double v : a.b2) CHECK(v == 0.0);
  const double bound1 = 1.0 / std::sqrt(16.0);
  for (double v : a.w1.data()) CHECK(std::abs(v) <= bound1);
  const double bound2 = 1.0 / std::sqrt(64.0);
  for (double v : a.w2.data()) CHECK(std::abs(v) <= bound2);

  CHECK(code_of([] { ClassifierModel::init(0, 4, 2, 1); }) == ErrCode::bad_argument);
  CHECK(code_of([] { ClassifierModel::init(4, 4, 1, 1); }) == ErrCode::bad_class_count);
}

TEST_CASE("forward matches hand arithmetic on a two-by-two model") {
  const ClassifierModel m = hand_model();
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  const ForwardResult fwd = forward(m, x);
  CHECK(fwd.preactivations(0, 0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fwd.preactivations(0, 1) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(fwd.embeddings(0, 0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fwd.embeddings(0, 1) == 0.0);
  CHECK(fwd.logits(0, 0) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(fwd.logits(0, 1) == doctest::Approx(6.8).epsilon(1e-12));

  CHECK(embed(m, x) == fwd.embeddings);
}

TEST_CASE("forward rejects bad batches") {
  const ClassifierModel m = hand_model();
  CHECK(code_of([&] { forward(m, Matrix(1, 3, 0.0)); }) == ErrCode::dimension_mismatch);
  Matrix bad(1, 2, 0.0);
  bad(0, 1) = std::nan("");
  CHECK(code_of([&] { forward(m, bad); }) == ErrCode::non_finite);
}

TEST_CASE("uniform logits cost exactly log of the class count") {
  const Matrix logits(3, 10, 0.0);
  const std::vector<int> labels = {0, 5, 9};
  const std::vector<int> weights = {1, 1, 1};
  const LossResult r = weighted_loss(logits, labels, weights);
  CHECK(r.loss == doctest::Approx(3.0 * std::log(10.0)).epsilon(1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const double expected = 0.1 - (static_cast<int>(j) == labels[i] ? 1.0 : 0.0);
      CHECK(r.dlogits(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("unselected rows cost nothing and carry exactly zero gradient") {
  const Matrix logits = oracle::random_matrix(4, 3, 21);
  const std::vector<int> labels = {0, 1, 2, 1};

  const LossResult none = weighted_loss(logits, labels, std::vector<int>{0, 0, 0, 0});
  CHECK(none.loss == 0.0);
  for (double v : none.dlogits.data()) CHECK(v == 0.0);

  const LossResult some = weighted_loss(logits, labels, std::vector<int>{1, 0, 1, 0});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(some.dlogits(1, j) == 0.0);
    CHECK(some.dlogits(3, j) == 0.0);
  }

  // Selected rows: the gradient over classes sums to zero.
  for (std::size_t i : {0u, 2u}) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += some.dlogits(i, j);
    CHECK(std::abs(sum) < 1e-12);
  }

  // The weighted sum decomposes into per-example terms.
  const LossResult all = weighted_loss(logits, labels, std::vector<int>{1, 1, 1, 1});
  double pieces = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<int> only(4, 0);
    only[i] = 1;
    pieces += weighted_loss(logits, labels, only).loss;
  }
  CHECK(all.loss == doctest::Approx(pieces).epsilon(1e-12));
}

TEST_CASE("loss gradient with respect to logits matches finite differences") {
  Matrix logits = oracle::random_matrix(5, 4, 33);
  const std::vector<int> labels = {0, 3, 1, 2, 2};
  const std::vector<int> weights = {1, 0, 1, 1, 0};
  const LossResult r = weighted_loss(logits, labels, weights);

  const double h = 1e-6;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    for (std::size_t j = 0; j < logits.cols(); ++j) {
      const double saved = logits(i, j);
      logits(i, j) = saved + h;
      const double up = weighted_loss(logits, labels, weights).loss;
      logits(i, j) = saved - h;
      const double down = weighted_loss(logits, labels, weights).loss;
      logits(i, j) = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(std::abs(r.dlogits(i, j) - fd) < 1e-7);
    }
  }
}

TEST_CASE("weighted_loss rejects malformed input") {
  const Matrix logits(2, 3, 0.0);
  CHECK(code_of([&] {
          weighted_loss(logits, std::vector<int>{0, 1}, std::vector<int>{1, 2});
        }) == ErrCode::bad_argument);
  CHECK(code_of([&] {
          weighted_loss(logits, std::vector<int>{0, 3}, std::vector<int>{1, 1});
        }) == ErrCode::label_out_of_range);
  CHECK(code_of([&] {
          weighted_loss(logits, std::vector<int>{0}, std::vector<int>{1});
        }) == ErrCode::dimension_mismatch);
}

TEST_CASE("backpropagated gradients match central finite differences") {
  ClassifierModel model = ClassifierModel::init(4, 6, 3, 77);
  const Matrix batch = kink_free_batch(model, 5, 501);
  const std::vector<int> labels = oracle::random_labels(5, 3, 502);
  const std::vector<int> weights = {1, 1, 0, 1, 1};

  const ForwardResult fwd = forward(model, batch);
  const LossResult loss = weighted_loss(fwd.logits, labels, weights);
  const ModelGradients grads = backward(model, batch, fwd, loss.dlogits);

  auto loss_of = [&](ClassifierModel& m) {
    return weighted_loss(forward(m, batch).logits, labels, weights).loss;
  };
  const std::vector<double> fd = oracle::finite_diff_gradient(model, loss_of);

  std::vector<double> analytic;
  for (double v : grads.w1.data()) analytic.push_back(v);
  for (double v : grads.b1) analytic.push_back(v);
  for (double v : grads.w2.data()) analytic.push_back(v);
  for (double v : grads.b2) analytic.push_back(v);

  REQUIRE(analytic.size() == fd.size());
  for (std::size_t p = 0; p < fd.size(); ++p) {
    CHECK(std::abs(analytic[p] - fd[p]) <=
          1e-6 * std::max({1.0, std::abs(analytic[p]), std::abs(fd[p])}));
  }
}

TEST_CASE("rows with zero weight leave no trace in the gradient") {
  ClassifierModel model = ClassifierModel::init(3, 5, 4, 11);
  const Matrix batch = oracle::random_matrix(6, 3, 61);
  const std::vector<int> labels = oracle::random_labels(6, 4, 62);
  std::vector<int> weights = {1, 0, 1, 0, 0, 1};

  const ForwardResult fwd = forward(model, batch);
  const LossResult loss = weighted_loss(fwd.logits, labels, weights);
  const ModelGradients full = backward(model, batch, fwd, loss.dlogits);

  // The same three selected rows packed into their own batch.
  Matrix packed(3, 3);
  std::vector<int> packed_labels;
  std::size_t row = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (!weights[i]) continue;
    for (std::size_t f = 0; f < 3; ++f) packed(row, f) = batch(i, f);
    packed_labels.push_back(labels[i]);
    ++row;
  }
  const ForwardResult packed_fwd = forward(model, packed);
  const LossResult packed_loss =
      weighted_loss(packed_fwd.logits, packed_labels, std::vector<int>{1, 1, 1});
  const ModelGradients packed_grads =
      backward(model, packed, packed_fwd, packed_loss.dlogits);

  CHECK(loss.loss == packed_loss.loss);
  CHECK(full.w1 == packed_grads.w1);
  CHECK(full.b1 == packed_grads.b1);
  CHECK(full.w2 == packed_grads.w2);
  CHECK(full.b2 == packed_grads.b2);
}

TEST_CASE("one descent step matches hand arithmetic") {
  ClassifierModel model;
  model.input_dim = 1;
  model.embedding_dim = 1;
  model.num_classes = 2;
  model.w1 = Matrix(1, 1, 1.0);
  model.b1 = {0.0};
  model.w2 = Matrix(2, 1, 0.0);
  model.b2 = {0.0, 0.0};

  ModelGradients grads = ModelGradients::zeros_like(model);
  grads.w1(0, 0) = 0.5;

  OptimizerState opt;
  opt.lr_init = 0.05;
  opt.lr_decay_epoch = 100;
  opt.lr_decay_factor = 10.0;
  opt.momentum = 0.9;
  opt.weight_decay = 0.0005;

  sgd_step(model, grads, opt, 0);
  // v = 0.9 * 0 + 0.5; theta = 1 - 0.05 * (0.5 + 0.0005 * 1) = 0.974975.
  CHECK(model.w1(0, 0) == doctest::Approx(0.974975).epsilon(1e-12));

  sgd_step(model, grads, opt, 0);
  // v = 0.9 * 0.5 + 0.5 = 0.95;
  // theta = 0.974975 - 0.05 * (0.95 + 0.0005 * 0.974975).
  const double expected = 0.974975 - 0.05 * (0.95 + 0.0005 * 0.974975);
  CHECK(model.w1(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("the schedule divides the step size once at the decay epoch") {
  OptimizerState opt;
  opt.lr_init = 0.05;
  opt.lr_decay_epoch = 100;
  opt.lr_decay_factor = 10.0;
  CHECK(learning_rate(opt, 0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(learning_rate(opt, 99) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(learning_rate(opt, 100) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(learning_rate(opt, 500) == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("weight decay alone shrinks parameters toward zero") {
  ClassifierModel model = ClassifierModel::init(2, 3, 2, 5);
  const ClassifierModel before = model;
  OptimizerState opt;
  opt.weight_decay = 0.01;
  opt.momentum = 0.0;
  const ModelGradients zero = ModelGradients::zeros_like(model);
  sgd_step(model, zero, opt, 0);
  for (std::size_t i = 0; i < model.w1.data().size(); ++i) {
    const double expected = before.w1.data()[i] * (1.0 - opt.lr_init * 0.01);
    CHECK(model.w1.data()[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("sgd_step rejects mismatched or broken gradients") {
  ClassifierModel model = ClassifierModel::init(2, 3, 2, 5);
  OptimizerState opt;
  ModelGradients wrong = ModelGradients::zeros_like(ClassifierModel::init(3, 3, 2, 5));
  CHECK(code_of([&] { sgd_step(model, wrong, opt, 0); }) == ErrCode::dimension_mismatch);

  ModelGradients nan_grads = ModelGradients::zeros_like(model);
  nan_grads.w2(0, 0) = std::nan("");
  CHECK(code_of([&] { sgd_step(model, nan_grads, opt, 0); }) == ErrCode::non_finite);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  const std::string dir = testutil::scratch_dir("checkpoint");
  const ClassifierModel model = ClassifierModel::init(7, 5, 3, 99);
  const std::string path = dir + "/model.ckpt";
  save_checkpoint(model, path);
  const ClassifierModel loaded = load_checkpoint(path);
  CHECK(loaded == model);
}

TEST_CASE("checkpoint loading rejects damaged files") {
  const std::string dir = testutil::scratch_dir("checkpoint_errors");
  const ClassifierModel model = ClassifierModel::init(3, 2, 2, 1);
  const std::string path = dir + "/model.ckpt";
  save_checkpoint(model, path);

  CHECK(code_of([&] { load_checkpoint(dir + "/absent.ckpt"); }) == ErrCode::io_failure);

  {
    std::ofstream out(dir + "/bad_header.ckpt");
    out << "LEND-MODEL v1 d_in=3 d=2 c=2\n1 2 3\n";
  }
  CHECK(code_of([&] { load_checkpoint(dir + "/bad_header.ckpt"); }) ==
        ErrCode::malformed_header);

  {
    std::ofstream out(dir + "/short.ckpt");
    out << "LEND-CKPT v1 d_in=3 d=2 c=2\n0.5 0.5\n";
  }
  CHECK(code_of([&] { load_checkpoint(dir + "/short.ckpt"); }) ==
        ErrCode::dimension_mismatch);

  {
    std::ifstream in(path);
    std::stringstream copy;
    copy << in.rdbuf();
    std::ofstream out(dir + "/long.ckpt");
    out << copy.str() << "3.25\n";
  }
  CHECK(code_of([&] { load_checkpoint(dir + "/long.ckpt"); }) ==
        ErrCode::dimension_mismatch);
}
