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

#include "ofar/index.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.h"
#include "ofar/error.h"

namespace ofar {

namespace {

constexpr std::string_view kIndexMagic = "OFARIDX1";

bool HitBefore(double score_a, const std::string& id_a, double score_b,
               const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

}  // namespace

RetrievalIndex RetrievalIndex::Build(std::span<const EncodedItem> docs) {
  if (docs.empty()) throw Error(ErrorCode::kEmpty, "no documents to index");
  RetrievalIndex index;
  index.dim_ = docs.front().matrix.dim();
  index.pad_len_ = docs.front().matrix.pad_len();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const TokenMatrix& m = docs[i].matrix;
    if (m.dim() != index.dim_ || m.pad_len() != index.pad_len_) {
      throw Error(ErrorCode::kDimMismatch, "document '" + docs[i].source_id +
                                               "' has a different shape");
    }
    if (m.num_tokens() == 0) throw Error(ErrorCode::kEmptyMask, docs[i].source_id);
    if (!index.lookup_.emplace(docs[i].source_id, i).second) {
      throw Error(ErrorCode::kDuplicateId, docs[i].source_id);
    }
    index.doc_ids_.push_back(docs[i].source_id);
    index.doc_offsets_.push_back(index.origins_.size());
    index.doc_counts_.push_back(m.num_tokens());
    std::size_t pos = 0;
    for (std::size_t r = 0; r < m.pad_len(); ++r) {
      if (!m.valid(r)) continue;
      for (double v : m.row(r)) index.pool_.push_back(static_cast<float>(v));
      index.origins_.push_back({i, pos++});
    }
  }
  return index;
}

std::optional<std::size_t> RetrievalIndex::find(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> RetrievalIndex::doc_rows(std::size_t doc) const {
  return {pool_.data() + doc_offsets_[doc] * dim_, doc_counts_[doc] * dim_};
}

TokenMatrix RetrievalIndex::doc_matrix(std::size_t doc) const {
  Matrix rows(pad_len_, dim_);
  std::vector<bool> mask(pad_len_, false);
  auto src = doc_rows(doc);
  for (std::size_t r = 0; r < doc_counts_[doc]; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) rows(r, c) = src[r * dim_ + c];
    mask[r] = true;
  }
  return TokenMatrix::FromUnitRows(std::move(rows), std::move(mask));
}

void RetrievalIndex::CheckQuery(const TokenMatrix& q, std::size_t k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (q.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "query dim " + std::to_string(q.dim()) +
                                             " != index dim " + std::to_string(dim_));
  }
  if (q.num_tokens() == 0) throw Error(ErrorCode::kEmptyMask, "query has no valid rows");
}

double RetrievalIndex::ScoreDoc(const kernel::PackedQuery& q, std::size_t doc,
                                ScoreMode mode,
                                std::vector<TokenAttribution>* attributions) const {
  const float* rows = pool_.data() + doc_offsets_[doc] * dim_;
  if (mode == ScoreMode::kSingle) {
    const double s = kernel::Dot(q.rows.data(), rows, dim_);
    if (attributions != nullptr) {
      attributions->assign(1, {q.row_index.front(), 0, s});
    }
    return s;
  }
  return kernel::MaxSim(q, rows, doc_counts_[doc], attributions);
}

RankedHits RetrievalIndex::Rank(const kernel::PackedQuery& q,
                                std::span<const std::size_t> docs, std::size_t k,
                                ScoreMode mode) const {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(docs.size());
  for (std::size_t doc : docs) scored.emplace_back(ScoreDoc(q, doc, mode, nullptr), doc);
  const std::size_t keep = std::min(k, scored.size());
  auto before = [&](const auto& a, const auto& b) {
    return HitBefore(a.first, doc_ids_[a.second], b.first, doc_ids_[b.second]);
  };
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), before);
  RankedHits out;
  out.k_requested = k;
  out.entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    Hit hit;
    hit.doc_id = doc_ids_[scored[i].second];
    hit.score = ScoreDoc(q, scored[i].second, mode, &hit.attributions);
    out.entries.push_back(std::move(hit));
  }
  return out;
}

RankedHits RetrievalIndex::SearchExact(const TokenMatrix& q, std::size_t k,
                                       ScoreMode mode) const {
  CheckQuery(q, k);
  std::vector<std::size_t> all(size());
  std::iota(all.begin(), all.end(), 0);
  return Rank(kernel::Pack(q), all, k, mode);
}

std::vector<std::size_t> RetrievalIndex::Candidates(const TokenMatrix& q,
                                                    std::size_t probe) const {
  if (probe < 1) throw Error(ErrorCode::kInvalidArgument, "probe must be >= 1");
  const auto packed = kernel::Pack(q);
  const std::size_t n_pool = origins_.size();
  std::vector<char> is_candidate(size(), 0);
  if (probe >= n_pool) {
    std::fill(is_candidate.begin(), is_candidate.end(), 1);
  } else {
    std::vector<std::pair<double, std::size_t>> sims(n_pool);
    auto better = [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    };
    for (std::size_t i = 0; i < packed.size(); ++i) {
      const double* qi = packed.rows.data() + i * dim_;
      for (std::size_t t = 0; t < n_pool; ++t) {
        sims[t] = {kernel::Dot(qi, pool_.data() + t * dim_, dim_), t};
      }
      std::nth_element(sims.begin(), sims.begin() + (probe - 1), sims.end(), better);
      for (std::size_t t = 0; t < probe; ++t) {
        is_candidate[origins_[sims[t].second].doc] = 1;
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < size(); ++d) {
    if (is_candidate[d]) out.push_back(d);
  }
  return out;
}

RankedHits RetrievalIndex::SearchApprox(const TokenMatrix& q, std::size_t k,
                                        std::size_t probe) const {
  CheckQuery(q, k);
  const auto candidates = Candidates(q, probe);
  return Rank(kernel::Pack(q), candidates, k, ScoreMode::kMaxSim);
}

std::string RetrievalIndex::Serialize() const {
  internal::ByteWriter w;
  w.Bytes(kIndexMagic);
  w.U32(kIndexVersion);
  w.U32(static_cast<std::uint32_t>(dim_));
  w.U32(static_cast<std::uint32_t>(pad_len_));
  w.U64(doc_ids_.size());
  for (std::size_t d = 0; d < size(); ++d) {
    w.U64(doc_ids_[d].size());
    w.Bytes(doc_ids_[d]);
    w.U32(static_cast<std::uint32_t>(doc_counts_[d]));
    for (float v : doc_rows(d)) w.F32(v);
  }
  for (const auto& o : origins_) {
    w.U64(o.doc);
    w.U64(o.position);
  }
  return w.buffer();
}

void RetrievalIndex::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

RetrievalIndex RetrievalIndex::Deserialize(std::string bytes) {
  internal::ByteReader r(std::move(bytes));
  if (r.remaining() < kIndexMagic.size() || r.Bytes(kIndexMagic.size()) != kIndexMagic) {
    throw Error(ErrorCode::kBadMagic, "not an index file");
  }
  const std::uint32_t version = r.U32();
  if (version != kIndexVersion) {
    throw Error(ErrorCode::kVersionMismatch, "index version " + std::to_string(version));
  }
  RetrievalIndex index;
  index.dim_ = r.U32();
  index.pad_len_ = r.U32();
  const std::uint64_t n_docs = r.U64();
  if (index.dim_ == 0 || index.pad_len_ == 0 || n_docs == 0) {
    throw Error(ErrorCode::kCorruptLength, "degenerate index header");
  }
  // Each document needs at least a u64 length, a u32 count and one row.
  r.Need(std::min<std::uint64_t>(n_docs, r.remaining()) * (12 + 4 * index.dim_));
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    const std::uint64_t id_len = r.U64();
    r.Need(id_len);
    std::string id(r.Bytes(id_len));
    const std::uint32_t count = r.U32();
    if (count == 0 || count > index.pad_len_) {
      throw Error(ErrorCode::kCorruptLength, "document token count " + std::to_string(count));
    }
    r.Need(static_cast<std::uint64_t>(count) * index.dim_ * 4);
    if (!index.lookup_.emplace(id, d).second) throw Error(ErrorCode::kDuplicateId, id);
    index.doc_ids_.push_back(std::move(id));
    index.doc_offsets_.push_back(index.pool_.size() / index.dim_);
    index.doc_counts_.push_back(count);
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(count) * index.dim_; ++i) {
      index.pool_.push_back(r.F32());
    }
  }
  const std::size_t n_pool = index.pool_.size() / index.dim_;
  if (r.remaining() != n_pool * 16) {
    throw Error(ErrorCode::kCorruptLength,
                "back-pointer table is " + std::to_string(r.remaining()) +
                    " bytes, expected " + std::to_string(n_pool * 16));
  }
  index.origins_.reserve(n_pool);
  for (std::size_t t = 0; t < n_pool; ++t) {
    TokenOrigin o{r.U64(), r.U64()};
    if (o.doc >= n_docs || index.doc_offsets_[o.doc] + o.position != t) {
      throw Error(ErrorCode::kCorruptLength,
                  "back-pointer " + std::to_string(t) + " is inconsistent");
    }
    index.origins_.push_back(o);
  }
  return index;
}

RetrievalIndex RetrievalIndex::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed for " + path.string());
  return Deserialize(std::move(data));
}

}  // namespace ofar
