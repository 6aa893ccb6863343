#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lend/matrix.hpp"

namespace lend {

// One-hot label mass, one row per batch position.
Matrix init_batch(std::span<const int> noisy_labels, int num_classes);

// Iterates Z <- alpha * W * Z + (1 - alpha) * Z for `iterations` rounds,
// stopping early once the largest entry change drops below tol (tol = 0
// disables the early stop). W must be square and nonnegative.
Matrix dilute(const Matrix& z0, const Matrix& w, double alpha, int iterations,
              double tol);

// Per-example diluted label mass, persisted across epochs and keyed by
// stable example id. Rows start as the one-hot encoding of the noisy
// labels, so every row is meaningful before its first update.
class DilutedLabelStore {
 public:
  DilutedLabelStore() = default;
  DilutedLabelStore(std::span<const int> noisy_labels, int num_classes, double alpha,
                    double beta, int iterations, double tol);

  std::size_t size() const { return rows_.rows(); }
  int num_classes() const { return static_cast<int>(rows_.cols()); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int iterations() const { return iterations_; }
  double tol() const { return tol_; }

  // Number of momentum updates applied so far.
  long epoch_counter() const { return epoch_counter_; }
  bool touched(int id) const;

  std::span<const double> row(int id) const;
  const Matrix& rows() const { return rows_; }

  // Blends freshly diluted batch rows into the store:
  // row <- (1 - beta) * z + beta * row. Advances the epoch counter.
  void momentum_update(std::span<const int> batch_ids, const Matrix& z);

  // Index of the largest mass in the row; ties pick the smallest class.
  int diluted_argmax(int id) const;

  // "id, argmax, mass_0..mass_{C-1}" rows in id order.
  void write_snapshot(std::ostream& out) const;

 private:
  Matrix rows_;
  std::vector<std::uint8_t> touched_;
  long epoch_counter_ = 0;
  double alpha_ = 0.99;
  double beta_ = 0.9;
  double tol_ = 1e-6;
  int iterations_ = 10;
};

}  // namespace lend
