#include "lend/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lend/errors.hpp"
#include "lend/parallel.hpp"
#include "lend/text.hpp"

namespace lend {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.index < b.index;
}

}  // namespace

Matrix l2_normalized(const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double norm = std::sqrt(dot(m.row(i), m.row(i)));
    if (norm > 0.0) {
      for (double& v : out.row(i)) v /= norm;
    }
  }
  return out;
}

NeighborList find_knn(const Matrix& embeddings, int k) {
  const std::size_t n = embeddings.rows();
  if (n < 2) {
    throw Error(ErrCode::empty_input,
                "k-nearest-neighbor search needs at least 2 rows, got " +
                    std::to_string(n));
  }
  if (k < 1) {
    throw Error(ErrCode::bad_argument, "k must be positive, got " + std::to_string(k));
  }
  if (!embeddings.all_finite()) {
    throw Error(ErrCode::non_finite, "embeddings contain a non-finite value");
  }

  const Matrix unit = l2_normalized(embeddings);
  const std::size_t kk = std::min<std::size_t>(k, n - 1);

  NeighborList result;
  result.lists.resize(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<Neighbor> candidates;
    candidates.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates.push_back(
          {static_cast<int>(j), dot(unit.row(i), unit.row(j))});
    }
    std::partial_sort(candidates.begin(), candidates.begin() + kk, candidates.end(),
                      closer);
    candidates.resize(kk);
    result.lists[i] = std::move(candidates);
  });
  return result;
}

SparseMatrix build_affinity(const NeighborList& neighbors, const Matrix& embeddings,
                            double gamma) {
  if (neighbors.size() != embeddings.rows()) {
    throw Error(ErrCode::dimension_mismatch,
                "neighbor list and embedding row counts disagree");
  }
  if (!(gamma > 0.0)) {
    throw Error(ErrCode::bad_argument,
                "sharpening exponent must be positive, got " + format_double(gamma));
  }

  const Matrix unit = l2_normalized(embeddings);
  SparseMatrix affinity;
  affinity.n = neighbors.size();
  affinity.rows.resize(affinity.n);
  for (std::size_t i = 0; i < affinity.n; ++i) {
    auto& row = affinity.rows[i];
    for (const Neighbor& nb : neighbors.lists[i]) {
      const double sim = dot(unit.row(i), unit.row(nb.index));
      if (sim <= 0.0) continue;
      row.emplace_back(nb.index, std::pow(sim, gamma));
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return affinity;
}

SimilarityGraph normalize(const SparseMatrix& affinity, double gamma, int k) {
  const std::size_t n = affinity.n;
  if (affinity.rows.size() != n) {
    throw Error(ErrCode::dimension_mismatch, "sparse matrix row count disagrees with n");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [col, value] : affinity.rows[i]) {
      if (col < 0 || static_cast<std::size_t>(col) >= n) {
        throw Error(ErrCode::dimension_mismatch,
                    "affinity column index out of range");
      }
      if (static_cast<std::size_t>(col) == i) {
        throw Error(ErrCode::bad_argument, "affinity diagonal must be zero");
      }
      if (!(value >= 0.0)) {
        throw Error(ErrCode::bad_argument, "affinity entries must be nonnegative");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrCode::non_finite, "affinity entry is non-finite");
      }
    }
  }

  SimilarityGraph graph;
  graph.affinity = affinity;
  graph.gamma = gamma;
  graph.k = k;

  // gram(j, l) = sum_i A(i, j) A(i, l); accumulating in ascending i keeps
  // the matrix bitwise symmetric.
  graph.gram = Matrix(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = affinity.rows[i];
    for (const auto& [j, a] : row) {
      for (const auto& [l, b] : row) {
        graph.gram(j, l) += a * b;
      }
    }
  }

  graph.degrees.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) sum += graph.gram(j, l);
    graph.degrees[j] = sum;
  }

  std::vector<double> scale(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (graph.degrees[j] > 0.0) scale[j] = 1.0 / std::sqrt(graph.degrees[j]);
  }

  // The scale product is grouped so that (j, l) and (l, j) round
  // identically, keeping the result bitwise symmetric.
  graph.normalized = Matrix(n, n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    for (std::size_t l = 0; l < n; ++l) {
      graph.normalized(j, l) = graph.gram(j, l) * (scale[j] * scale[l]);
    }
  });
  return graph;
}

SimilarityGraph build_similarity_graph(const Matrix& embeddings, int k, double gamma) {
  const NeighborList neighbors = find_knn(embeddings, k);
  const SparseMatrix affinity = build_affinity(neighbors, embeddings, gamma);
  return normalize(affinity, gamma, k);
}

int dominant_label(std::size_t i, const NeighborList& neighbors,
                   std::span<const int> labels) {
  if (i >= neighbors.size()) {
    throw Error(ErrCode::unknown_id, "query index " + std::to_string(i) +
                                         " outside the neighbor list");
  }
  const auto& list = neighbors.lists[i];
  if (list.empty()) {
    throw Error(ErrCode::empty_input,
                "row " + std::to_string(i) + " has no neighbors");
  }
  int max_label = 0;
  for (const Neighbor& nb : list) {
    if (static_cast<std::size_t>(nb.index) >= labels.size()) {
      throw Error(ErrCode::unknown_id, "neighbor index outside the label span");
    }
    max_label = std::max(max_label, labels[nb.index]);
  }
  std::vector<int> counts(max_label + 1, 0);
  for (const Neighbor& nb : list) counts[labels[nb.index]]++;
  int winner = 0;
  for (int c = 1; c <= max_label; ++c) {
    if (counts[c] > counts[winner]) winner = c;
  }
  return winner;
}

void write_affinity_csv(const SimilarityGraph& graph, std::ostream& out) {
  out << "i,j,value\n";
  for (std::size_t i = 0; i < graph.affinity.n; ++i) {
    for (const auto& [j, value] : graph.affinity.rows[i]) {
      out << i << ',' << j << ',' << format_double(value) << "\n";
    }
  }
}

void write_normalized_csv(const SimilarityGraph& graph, std::ostream& out) {
  out << "i,j,value\n";
  for (std::size_t i = 0; i < graph.normalized.rows(); ++i) {
    for (std::size_t j = 0; j < graph.normalized.cols(); ++j) {
      const double value = graph.normalized(i, j);
      if (value != 0.0) out << i << ',' << j << ',' << format_double(value) << "\n";
    }
  }
}

}  // namespace lend
