// Copyright 2026 The ofar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ofar/token_matrix.h"

namespace ofar {

// The document row that won the max for one query row, and its similarity.
struct TokenAttribution {
  std::size_t query_row;
  std::size_t doc_row;
  double similarity;

  bool operator==(const TokenAttribution&) const = default;
};

struct ScoreResult {
  double score = 0.0;
  // One entry per masked-true query row, in row order.
  std::vector<TokenAttribution> attributions;
};

enum class ScoreMode { kMaxSim, kSingle };

// Late-interaction relevance: for every valid query row take the maximum
// inner product over valid document rows, then sum. Ties in the max resolve
// to the lowest document row. Throws kDimMismatch / kEmptyMask.
ScoreResult maxsim_score(const TokenMatrix& q, const TokenMatrix& d);

// Inner product of the first valid row of each side (summary-token
// baseline).
double single_vector_score(const TokenMatrix& q, const TokenMatrix& d);

// Entry (u, b) is the score of queries[u] against docs[b].
Matrix batch_score_matrix(std::span<const TokenMatrix> queries,
                          std::span<const TokenMatrix> docs, ScoreMode mode);

// Batch scoring that also returns per-pair attributions (maxsim mode only;
// single mode leaves them empty). attributions is indexed [u * B + b].
struct BatchScores {
  Matrix scores;
  std::vector<std::vector<TokenAttribution>> attributions;
};
BatchScores batch_score(std::span<const TokenMatrix> queries,
                        std::span<const TokenMatrix> docs, ScoreMode mode);

namespace kernel {

// Dense valid rows of a query: row-major n x dim, plus their original row
// indices.
struct PackedQuery {
  std::vector<double> rows;
  std::vector<std::size_t> row_index;
  std::size_t dim = 0;

  std::size_t size() const { return row_index.size(); }
  std::span<const double> row(std::size_t i) const {
    return {rows.data() + i * dim, dim};
  }
};

PackedQuery Pack(const TokenMatrix& q);

template <typename T>
inline double Dot(const double* a, const T* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t c = 0; c < dim; ++c) acc += a[c] * static_cast<double>(b[c]);
  return acc;
}

// MaxSim of a packed query against n_doc contiguous document rows. When
// attributions is non-null it receives (query row, doc position, sim) with
// doc positions relative to the contiguous block.
template <typename T>
double MaxSim(const PackedQuery& q, const T* doc_rows, std::size_t n_doc,
              std::vector<TokenAttribution>* attributions) {
  const std::size_t dim = q.dim;
  double total = 0.0;
  if (attributions != nullptr) {
    attributions->clear();
    attributions->reserve(q.size());
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double* qi = q.rows.data() + i * dim;
    double best = Dot(qi, doc_rows, dim);
    std::size_t best_j = 0;
    for (std::size_t j = 1; j < n_doc; ++j) {
      const double s = Dot(qi, doc_rows + j * dim, dim);
      if (s > best) {
        best = s;
        best_j = j;
      }
    }
    total += best;
    if (attributions != nullptr) {
      attributions->push_back({q.row_index[i], best_j, best});
    }
  }
  return total;
}

}  // namespace kernel

}  // namespace ofar
