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

#include "ofar/maxsim.h"

#include <string>

#include "ofar/error.h"

namespace ofar {

namespace {

void CheckPair(const TokenMatrix& q, const TokenMatrix& d) {
  if (q.dim() != d.dim()) {
    throw Error(ErrorCode::kDimMismatch, "query dim " + std::to_string(q.dim()) +
                                             " != document dim " + std::to_string(d.dim()));
  }
  if (q.num_tokens() == 0 || d.num_tokens() == 0) {
    throw Error(ErrorCode::kEmptyMask, "token matrix without valid rows");
  }
}

// Valid document rows packed contiguously, with their original indices.
struct PackedDoc {
  std::vector<double> rows;
  std::vector<std::size_t> row_index;
};

PackedDoc PackDoc(const TokenMatrix& d) {
  auto q = kernel::Pack(d);
  return {std::move(q.rows), std::move(q.row_index)};
}

ScoreResult Score(const kernel::PackedQuery& q, const PackedDoc& d) {
  ScoreResult out;
  out.score = kernel::MaxSim(q, d.rows.data(), d.row_index.size(), &out.attributions);
  for (auto& a : out.attributions) a.doc_row = d.row_index[a.doc_row];
  return out;
}

std::size_t FirstValid(const TokenMatrix& m) {
  for (std::size_t r = 0; r < m.pad_len(); ++r) {
    if (m.valid(r)) return r;
  }
  throw Error(ErrorCode::kEmptyMask, "token matrix without valid rows");
}

}  // namespace

namespace kernel {

PackedQuery Pack(const TokenMatrix& q) {
  PackedQuery p;
  p.dim = q.dim();
  p.rows.reserve(q.num_tokens() * q.dim());
  p.row_index.reserve(q.num_tokens());
  for (std::size_t r = 0; r < q.pad_len(); ++r) {
    if (!q.valid(r)) continue;
    auto row = q.row(r);
    p.rows.insert(p.rows.end(), row.begin(), row.end());
    p.row_index.push_back(r);
  }
  return p;
}

}  // namespace kernel

ScoreResult maxsim_score(const TokenMatrix& q, const TokenMatrix& d) {
  CheckPair(q, d);
  return Score(kernel::Pack(q), PackDoc(d));
}

double single_vector_score(const TokenMatrix& q, const TokenMatrix& d) {
  CheckPair(q, d);
  auto a = q.row(FirstValid(q));
  auto b = d.row(FirstValid(d));
  return kernel::Dot(a.data(), b.data(), a.size());
}

BatchScores batch_score(std::span<const TokenMatrix> queries,
                        std::span<const TokenMatrix> docs, ScoreMode mode) {
  BatchScores out;
  out.scores = Matrix(queries.size(), docs.size());
  if (queries.empty() || docs.empty()) {
    throw Error(ErrorCode::kEmpty, "empty batch");
  }
  for (const auto& q : queries) CheckPair(q, docs.front());
  for (const auto& d : docs) CheckPair(queries.front(), d);

  if (mode == ScoreMode::kSingle) {
    for (std::size_t u = 0; u < queries.size(); ++u) {
      for (std::size_t b = 0; b < docs.size(); ++b) {
        out.scores(u, b) = single_vector_score(queries[u], docs[b]);
      }
    }
    return out;
  }

  std::vector<kernel::PackedQuery> packed_q;
  packed_q.reserve(queries.size());
  for (const auto& q : queries) packed_q.push_back(kernel::Pack(q));
  std::vector<PackedDoc> packed_d;
  packed_d.reserve(docs.size());
  for (const auto& d : docs) packed_d.push_back(PackDoc(d));

  out.attributions.resize(queries.size() * docs.size());
  for (std::size_t u = 0; u < queries.size(); ++u) {
    for (std::size_t b = 0; b < docs.size(); ++b) {
      ScoreResult r = Score(packed_q[u], packed_d[b]);
      out.scores(u, b) = r.score;
      out.attributions[u * docs.size() + b] = std::move(r.attributions);
    }
  }
  return out;
}

Matrix batch_score_matrix(std::span<const TokenMatrix> queries,
                          std::span<const TokenMatrix> docs, ScoreMode mode) {
  return batch_score(queries, docs, mode).scores;
}

}  // namespace ofar
