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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ofar/encoder.h"
#include "ofar/maxsim.h"
#include "ofar/token_matrix.h"

namespace ofar {

struct Hit {
  std::string doc_id;
  double score = 0.0;
  // doc_row is the position among the document's valid rows.
  std::vector<TokenAttribution> attributions;
};

// Scores non-increasing; equal scores ordered by ascending doc_id.
struct RankedHits {
  std::vector<Hit> entries;
  std::size_t k_requested = 0;
};

// Where a token_pool row came from.
struct TokenOrigin {
  std::uint64_t doc;
  std::uint64_t position;

  bool operator==(const TokenOrigin&) const = default;
};

// Immutable collection of document token matrices. Valid rows of every
// document are stored contiguously in token_pool as f32; scoring accumulates
// in double.
class RetrievalIndex {
 public:
  // Throws kEmpty, kDuplicateId, kDimMismatch.
  static RetrievalIndex Build(std::span<const EncodedItem> docs);

  std::size_t size() const { return doc_ids_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t pad_len() const { return pad_len_; }

  const std::string& doc_id(std::size_t doc) const { return doc_ids_[doc]; }
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t doc_token_count(std::size_t doc) const { return doc_counts_[doc]; }
  std::span<const float> doc_rows(std::size_t doc) const;
  // The stored document as a TokenMatrix (valid rows first).
  TokenMatrix doc_matrix(std::size_t doc) const;

  std::size_t token_pool_size() const { return origins_.size(); }
  std::span<const float> token_pool() const { return pool_; }
  std::span<const TokenOrigin> token_origins() const { return origins_; }

  // Scores q against every document and keeps the top k.
  RankedHits SearchExact(const TokenMatrix& q, std::size_t k,
                         ScoreMode mode = ScoreMode::kMaxSim) const;

  // Stage 1: each valid query row selects its `probe` highest inner-product
  // rows of token_pool (ties by pool position); the owning documents form
  // the candidate set. Stage 2: exact MaxSim rerank of the candidates.
  // Returns fewer than k entries when the candidate set is smaller than k.
  RankedHits SearchApprox(const TokenMatrix& q, std::size_t k, std::size_t probe) const;

  // Candidate documents of stage 1, ascending.
  std::vector<std::size_t> Candidates(const TokenMatrix& q, std::size_t probe) const;

  // Index file: "OFARIDX1", u32 version, u32 dim, u32 pad_len, u64 doc
  // count, per doc (u64 id length, id bytes, u32 token count, f32 rows),
  // then one (u64 doc, u64 position) pair per token_pool row.
  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;
  static RetrievalIndex Deserialize(std::string bytes);
  static RetrievalIndex Load(const std::filesystem::path& path);

 private:
  RetrievalIndex() = default;

  void CheckQuery(const TokenMatrix& q, std::size_t k) const;
  double ScoreDoc(const kernel::PackedQuery& q, std::size_t doc, ScoreMode mode,
                  std::vector<TokenAttribution>* attributions) const;
  RankedHits Rank(const kernel::PackedQuery& q, std::span<const std::size_t> docs,
                  std::size_t k, ScoreMode mode) const;

  std::size_t dim_ = 0;
  std::size_t pad_len_ = 0;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_offsets_;  // first pool row of each doc
  std::vector<std::size_t> doc_counts_;
  std::vector<float> pool_;
  std::vector<TokenOrigin> origins_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

inline constexpr std::uint32_t kIndexVersion = 1;
inline constexpr std::size_t kDefaultProbe = 32;

inline RetrievalIndex build_index(std::span<const EncodedItem> docs) {
  return RetrievalIndex::Build(docs);
}
inline RankedHits search_exact(const RetrievalIndex& index, const TokenMatrix& q,
                               std::size_t k) {
  return index.SearchExact(q, k);
}
inline RankedHits search_approx(const RetrievalIndex& index, const TokenMatrix& q,
                                std::size_t k, std::size_t probe) {
  return index.SearchApprox(q, k, probe);
}
inline void save_index(const RetrievalIndex& index, const std::filesystem::path& path) {
  index.Save(path);
}
inline RetrievalIndex load_index(const std::filesystem::path& path) {
  return RetrievalIndex::Load(path);
}

}  // namespace ofar
