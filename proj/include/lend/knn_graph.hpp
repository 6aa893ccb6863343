#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "lend/matrix.hpp"

namespace lend {

struct Neighbor {
  int index;
  double similarity;  // dot product of the L2-normalized rows
};

// Per query row: neighbors ordered by descending similarity, ties broken
// by the smaller index. A row never lists itself.
struct NeighborList {
  std::vector<std::vector<Neighbor>> lists;
  std::size_t size() const { return lists.size(); }
};

// Sparse nonnegative matrix with a zero diagonal; each row holds at most
// k entries sorted by column.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;
};

struct SimilarityGraph {
  std::vector<int> batch_ids;   // optional caller-attached example ids
  SparseMatrix affinity;        // A: truncated powered similarities
  double gamma = 0.0;
  int k = 0;
  Matrix gram;                  // A^T A: two-hop support
  std::vector<double> degrees;  // row sums of the gram matrix
  Matrix normalized;            // W = D^{-1/2} (A^T A) D^{-1/2}
};

// Row-wise L2 normalization; all-zero rows stay zero.
Matrix l2_normalized(const Matrix& m);

// Exact exhaustive k-nearest-neighbor search under the dot product of
// L2-normalized rows. k is clamped to |B| - 1.
NeighborList find_knn(const Matrix& embeddings, int k);

// A(i, j) = max(0, v_i . v_j)^gamma over each row's neighbor set, where
// v are the L2-normalized embedding rows. Zero entries are dropped.
SparseMatrix build_affinity(const NeighborList& neighbors, const Matrix& embeddings,
                            double gamma);

// Builds the gram matrix, its degree vector, and the symmetrically
// normalized graph. Rows with zero degree get a zero scaling factor, so
// isolated examples keep their own label mass during dilution.
SimilarityGraph normalize(const SparseMatrix& affinity, double gamma = 0.0, int k = 0);

SimilarityGraph build_similarity_graph(const Matrix& embeddings, int k, double gamma);

// Most frequent label among i's neighbors; ties pick the smallest class.
int dominant_label(std::size_t i, const NeighborList& neighbors,
                   std::span<const int> labels);

// Debug dumps as "i,j,value" triples, nonzero entries only.
void write_affinity_csv(const SimilarityGraph& graph, std::ostream& out);
void write_normalized_csv(const SimilarityGraph& graph, std::ostream& out);

}  // namespace lend
