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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "ofar/error.h"
#include "ofar/index.h"
#include "test_support.h"

namespace ofar {
namespace {

using testing::AsEncoded;
using testing::FromRows;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::vector<EncodedItem> TwoOrthogonal() {
  return {AsEncoded(FromRows({{1, 0}}, 2), "d1"), AsEncoded(FromRows({{0, 1}}, 2), "d2")};
}

TEST(BuildIndex, TokenPoolCountsValidRows) {
  std::mt19937_64 rng(1);
  std::vector<EncodedItem> docs;
  for (const char* id : {"a", "b", "c"}) {
    docs.push_back(AsEncoded(testing::RandomMatrix(rng, 5, 3, 2), id));
  }
  RetrievalIndex index = build_index(docs);
  EXPECT_EQ(index.size(), 3u);
  EXPECT_EQ(index.token_pool_size(), 6u);
  EXPECT_EQ(index.token_pool().size(), 18u);
  for (const TokenOrigin& o : index.token_origins()) {
    ASSERT_LT(o.doc, index.size());
    EXPECT_LT(o.position, index.doc_token_count(o.doc));
  }
}

TEST(BuildIndex, Errors) {
  auto docs = TwoOrthogonal();
  docs[1].source_id = "d1";
  EXPECT_EQ(CodeOf([&] { build_index(docs); }), ErrorCode::kDuplicateId);
  std::vector<EncodedItem> none;
  EXPECT_EQ(CodeOf([&] { build_index(none); }), ErrorCode::kEmpty);
  auto mixed = TwoOrthogonal();
  mixed.push_back(AsEncoded(FromRows({{1, 0, 0}}, 2), "d3"));
  EXPECT_EQ(CodeOf([&] { build_index(mixed); }), ErrorCode::kDimMismatch);
}

TEST(BuildIndex, DeterministicBytes) {
  std::mt19937_64 rng(2);
  auto docs = testing::RandomDocs(rng, 20, 6, 4, 6);
  EXPECT_EQ(build_index(docs).Serialize(), build_index(docs).Serialize());
}

TEST(SearchExact, OrthonormalCorpus) {
  RetrievalIndex index = build_index(TwoOrthogonal());
  RankedHits hits = search_exact(index, FromRows({{1, 0}}, 2), 2);
  EXPECT_EQ(hits.k_requested, 2u);
  ASSERT_EQ(hits.entries.size(), 2u);
  EXPECT_EQ(hits.entries[0].doc_id, "d1");
  EXPECT_EQ(hits.entries[0].score, 1.0);
  EXPECT_EQ(hits.entries[1].doc_id, "d2");
  EXPECT_EQ(hits.entries[1].score, 0.0);
}

TEST(SearchExact, KClampedAndTiesById) {
  std::vector<EncodedItem> docs{AsEncoded(FromRows({{0, 1}}, 2), "z"),
                                AsEncoded(FromRows({{0, 1}}, 2), "a"),
                                AsEncoded(FromRows({{1, 0}}, 2), "m")};
  RankedHits hits = search_exact(build_index(docs), FromRows({{1, 0}}, 2), 10);
  ASSERT_EQ(hits.entries.size(), 3u);
  EXPECT_EQ(hits.entries[0].doc_id, "m");
  EXPECT_EQ(hits.entries[1].doc_id, "a");
  EXPECT_EQ(hits.entries[2].doc_id, "z");
}

TEST(SearchExact, Errors) {
  RetrievalIndex index = build_index(TwoOrthogonal());
  EXPECT_EQ(CodeOf([&] { index.SearchExact(FromRows({{1, 0, 0}}, 2), 1); }),
            ErrorCode::kDimMismatch);
  EXPECT_EQ(CodeOf([&] { index.SearchExact(FromRows({{1, 0}}, 2), 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { index.SearchApprox(FromRows({{1, 0}}, 2), 1, 0); }),
            ErrorCode::kInvalidArgument);
}

TEST(SearchExact, MatchesNaiveOracle) {
  std::mt19937_64 rng(3);
  RetrievalIndex index = build_index(testing::RandomDocs(rng, 50, 8, 6, 8));
  for (int qi = 0; qi < 10; ++qi) {
    TokenMatrix q = testing::RandomMatrix(rng, 8, 6, 1 + qi % 8);
    RankedHits hits = index.SearchExact(q, 50);
    auto oracle = testing::NaiveSearch(index, q, 50);
    ASSERT_EQ(hits.entries.size(), oracle.size());
    for (std::size_t r = 0; r < oracle.size(); ++r) {
      EXPECT_EQ(hits.entries[r].doc_id, oracle[r].id);
      EXPECT_NEAR(hits.entries[r].score, oracle[r].score, 1e-9);
    }
  }
}

TEST(SearchExact, AttributionsPointAtStoredRows) {
  std::mt19937_64 rng(4);
  RetrievalIndex index = build_index(testing::RandomDocs(rng, 10, 8, 4, 8));
  TokenMatrix q = testing::RandomMatrix(rng, 8, 4, 3);
  for (const Hit& hit : index.SearchExact(q, 10).entries) {
    ASSERT_EQ(hit.attributions.size(), 3u);
    const std::size_t doc = *index.find(hit.doc_id);
    double sum = 0.0;
    for (const auto& a : hit.attributions) {
      EXPECT_TRUE(q.valid(a.query_row));
      EXPECT_LT(a.doc_row, index.doc_token_count(doc));
      sum += a.similarity;
    }
    EXPECT_NEAR(sum, hit.score, 1e-12);
  }
}

TEST(SingleMode, UsesFirstValidRow) {
  std::vector<EncodedItem> docs{AsEncoded(FromRows({{1, 0}, {0.6, 0.8}}, 2), "d")};
  RetrievalIndex index = build_index(docs);
  TokenMatrix q = FromRows({{0.6, 0.8}}, 2);
  EXPECT_NEAR(index.SearchExact(q, 1, ScoreMode::kSingle).entries[0].score, 0.6, 1e-6);
  EXPECT_NEAR(index.SearchExact(q, 1).entries[0].score, 1.0, 1e-6);
}

TEST(SearchApprox, ExhaustiveProbeEqualsExact) {
  std::mt19937_64 rng(5);
  RetrievalIndex index = build_index(testing::RandomDocs(rng, 40, 8, 6, 8));
  for (int qi = 0; qi < 10; ++qi) {
    TokenMatrix q = testing::RandomMatrix(rng, 8, 6, 1 + qi % 8);
    RankedHits exact = index.SearchExact(q, 15);
    RankedHits approx = index.SearchApprox(q, 15, index.token_pool_size());
    ASSERT_EQ(exact.entries.size(), approx.entries.size());
    for (std::size_t r = 0; r < exact.entries.size(); ++r) {
      EXPECT_EQ(exact.entries[r].doc_id, approx.entries[r].doc_id);
      EXPECT_EQ(exact.entries[r].score, approx.entries[r].score);
      EXPECT_EQ(exact.entries[r].attributions, approx.entries[r].attributions);
    }
  }
}

TEST(SearchApprox, ProbeOneFindsOwnerOfMatchingToken) {
  const std::size_t dim = 8;
  std::vector<EncodedItem> docs;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> e(dim, 0.0);
    e[i] = 1.0;
    docs.push_back(AsEncoded(FromRows({e}, 2), "doc" + std::to_string(i)));
  }
  RetrievalIndex index = build_index(docs);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> e(dim, 0.0);
    e[i] = 1.0;
    auto cands = index.Candidates(FromRows({e}, 2), 1);
    EXPECT_EQ(cands, std::vector<std::size_t>{i});
    EXPECT_EQ(index.SearchApprox(FromRows({e}, 2), 3, 1).entries.at(0).doc_id,
              "doc" + std::to_string(i));
  }
}

TEST(SearchApprox, ScoresEqualExactAndProbeIsMonotone) {
  std::mt19937_64 rng(6);
  RetrievalIndex index = build_index(testing::RandomDocs(rng, 200, 8, 8, 8));
  std::vector<TokenMatrix> queries;
  for (int i = 0; i < 20; ++i) queries.push_back(testing::RandomMatrix(rng, 8, 8, 4));
  std::size_t prev_found = 0;
  for (std::size_t probe : {1u, 2u, 4u, 8u, 16u, 32u, 64u, 4096u}) {
    std::size_t found = 0;
    for (const auto& q : queries) {
      RankedHits exact = index.SearchExact(q, index.size());
      std::map<std::string, double> exact_score;
      for (const Hit& h : exact.entries) exact_score[h.doc_id] = h.score;
      RankedHits approx = index.SearchApprox(q, 10, probe);
      std::set<std::string> top;
      for (std::size_t r = 0; r < 10; ++r) top.insert(exact.entries[r].doc_id);
      for (const Hit& h : approx.entries) {
        EXPECT_EQ(h.score, exact_score.at(h.doc_id));
        found += top.count(h.doc_id);
      }
    }
    EXPECT_GE(found, prev_found);
    prev_found = found;
  }
  EXPECT_EQ(prev_found, 10 * queries.size());
}

TEST(Persistence, RoundTripSearchIdentical) {
  testing::TempDir dir;
  std::mt19937_64 rng(7);
  RetrievalIndex index = build_index(testing::RandomDocs(rng, 30, 8, 6, 8));
  save_index(index, dir / "idx.bin");
  RetrievalIndex loaded = load_index(dir / "idx.bin");
  EXPECT_EQ(loaded.Serialize(), index.Serialize());
  for (int qi = 0; qi < 5; ++qi) {
    TokenMatrix q = testing::RandomMatrix(rng, 8, 6, 3);
    auto a = index.SearchExact(q, 10).entries;
    auto b = loaded.SearchExact(q, 10).entries;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      EXPECT_EQ(a[r].doc_id, b[r].doc_id);
      EXPECT_EQ(a[r].score, b[r].score);
    }
  }
}

TEST(Persistence, CorruptionIsDetected) {
  testing::TempDir dir;
  std::mt19937_64 rng(8);
  const std::string bytes = build_index(testing::RandomDocs(rng, 5, 4, 3, 4)).Serialize();
  auto write = [&](const std::string& name, const std::string& data) {
    std::ofstream out(dir / name, std::ios::binary);
    out << data;
    return dir / name;
  };
  for (std::size_t cut : {bytes.size() - 1, bytes.size() / 2, std::size_t{10}}) {
    EXPECT_EQ(CodeOf([&] { load_index(write("t.bin", bytes.substr(0, cut))); }),
              ErrorCode::kCorruptLength);
  }
  std::string bad = bytes;
  bad[3] = 'Z';
  EXPECT_EQ(CodeOf([&] { load_index(write("m.bin", bad)); }), ErrorCode::kBadMagic);
  bad = bytes;
  bad[8] = 2;
  EXPECT_EQ(CodeOf([&] { load_index(write("v.bin", bad)); }), ErrorCode::kVersionMismatch);
  EXPECT_EQ(CodeOf([&] { load_index(write("x.bin", bytes + "junk")); }),
            ErrorCode::kCorruptLength);
  EXPECT_EQ(CodeOf([&] { load_index(dir / "absent.bin"); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace ofar
