#include "lend/dilution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

#include "lend/errors.hpp"
#include "lend/parallel.hpp"
#include "lend/text.hpp"

namespace lend {

Matrix init_batch(std::span<const int> noisy_labels, int num_classes) {
  if (num_classes < 1) {
    throw Error(ErrCode::bad_class_count,
                "one-hot encoding needs at least one class");
  }
  Matrix z(noisy_labels.size(), num_classes, 0.0);
  for (std::size_t i = 0; i < noisy_labels.size(); ++i) {
    const int label = noisy_labels[i];
    if (label < 0 || label >= num_classes) {
      throw Error(ErrCode::label_out_of_range,
                  "label " + std::to_string(label) + " at batch position " +
                      std::to_string(i) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    z(i, label) = 1.0;
  }
  return z;
}

Matrix dilute(const Matrix& z0, const Matrix& w, double alpha, int iterations,
              double tol) {
  const std::size_t n = z0.rows();
  if (w.rows() != n || w.cols() != n) {
    throw Error(ErrCode::dimension_mismatch,
                "propagation matrix must be square and match the batch size");
  }
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw Error(ErrCode::bad_argument,
                "dilution strength must lie in [0, 1), got " + format_double(alpha));
  }
  if (iterations < 1) {
    throw Error(ErrCode::bad_argument, "iteration count must be positive");
  }
  if (tol < 0.0) {
    throw Error(ErrCode::bad_argument, "tolerance must be nonnegative");
  }
  if (!w.all_finite() || !z0.all_finite()) {
    throw Error(ErrCode::non_finite, "dilution input contains a non-finite value");
  }

  const std::size_t c_count = z0.cols();
  Matrix z = z0;
  Matrix next(n, c_count, 0.0);
  for (int t = 0; t < iterations; ++t) {
    std::atomic<double> max_delta{0.0};
    parallel_for(n, [&](std::size_t i) {
      double local_delta = 0.0;
      for (std::size_t c = 0; c < c_count; ++c) {
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) mass += w(i, j) * z(j, c);
        const double value = alpha * mass + (1.0 - alpha) * z(i, c);
        local_delta = std::max(local_delta, std::abs(value - z(i, c)));
        next(i, c) = value;
      }
      double seen = max_delta.load(std::memory_order_relaxed);
      while (local_delta > seen &&
             !max_delta.compare_exchange_weak(seen, local_delta)) {
      }
    });
    std::swap(z, next);
    if (!z.all_finite()) {
      throw Error(ErrCode::non_finite,
                  "dilution diverged at iteration " + std::to_string(t));
    }
    if (tol > 0.0 && max_delta.load() < tol) break;
  }
  return z;
}

DilutedLabelStore::DilutedLabelStore(std::span<const int> noisy_labels, int num_classes,
                                     double alpha, double beta, int iterations,
                                     double tol)
    : rows_(init_batch(noisy_labels, num_classes)),
      touched_(noisy_labels.size(), 0),
      alpha_(alpha),
      beta_(beta),
      tol_(tol),
      iterations_(iterations) {
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw Error(ErrCode::bad_argument, "dilution strength must lie in [0, 1)");
  }
  if (beta < 0.0 || beta >= 1.0) {
    throw Error(ErrCode::bad_argument, "momentum must lie in [0, 1)");
  }
  if (iterations < 1) {
    throw Error(ErrCode::bad_argument, "iteration count must be positive");
  }
  if (tol < 0.0) {
    throw Error(ErrCode::bad_argument, "tolerance must be nonnegative");
  }
}

bool DilutedLabelStore::touched(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size()) {
    throw Error(ErrCode::unknown_id, "id " + std::to_string(id) + " not in store");
  }
  return touched_[id] != 0;
}

std::span<const double> DilutedLabelStore::row(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size()) {
    throw Error(ErrCode::unknown_id, "id " + std::to_string(id) + " not in store");
  }
  return rows_.row(id);
}

void DilutedLabelStore::momentum_update(std::span<const int> batch_ids,
                                        const Matrix& z) {
  if (z.rows() != batch_ids.size() ||
      z.cols() != static_cast<std::size_t>(num_classes())) {
    throw Error(ErrCode::dimension_mismatch,
                "diluted batch shape disagrees with the id list");
  }
  if (!z.all_finite()) {
    throw Error(ErrCode::non_finite, "diluted batch contains a non-finite value");
  }
  for (int id : batch_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= size()) {
      throw Error(ErrCode::unknown_id, "id " + std::to_string(id) + " not in store");
    }
  }
  for (std::size_t b = 0; b < batch_ids.size(); ++b) {
    const int id = batch_ids[b];
    for (int c = 0; c < num_classes(); ++c) {
      rows_(id, c) = (1.0 - beta_) * z(b, c) + beta_ * rows_(id, c);
    }
    touched_[id] = 1;
  }
  ++epoch_counter_;
}

int DilutedLabelStore::diluted_argmax(int id) const {
  const auto values = row(id);
  bool any_mass = false;
  std::size_t best = 0;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c] != 0.0) any_mass = true;
    if (values[c] > values[best]) best = c;
  }
  if (!any_mass) {
    throw Error(ErrCode::degenerate_row,
                "row " + std::to_string(id) + " carries no label mass");
  }
  return static_cast<int>(best);
}

void DilutedLabelStore::write_snapshot(std::ostream& out) const {
  out << "id,argmax";
  for (int c = 0; c < num_classes(); ++c) out << ",mass_" << c;
  out << "\n";
  for (std::size_t id = 0; id < size(); ++id) {
    out << id << ',' << diluted_argmax(static_cast<int>(id));
    for (double v : rows_.row(id)) out << ',' << format_double(v);
    out << "\n";
  }
}

}  // namespace lend
