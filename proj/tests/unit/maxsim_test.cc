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

#include <numeric>
#include <random>

#include "ofar/maxsim.h"
#include "test_support.h"

namespace ofar {
namespace {

using testing::FromRows;

TEST(MaxSim, IdenticalSingleRows) {
  auto q = FromRows({{1, 0}}, 4);
  EXPECT_DOUBLE_EQ(maxsim_score(q, q).score, 1.0);
}

TEST(MaxSim, OrthogonalRows) {
  EXPECT_DOUBLE_EQ(maxsim_score(FromRows({{1, 0}}, 4), FromRows({{0, 1}}, 4)).score, 0.0);
}

TEST(MaxSim, PicksBestDocRow) {
  auto q = FromRows({{1, 0}, {0, 1}}, 4);
  auto d = FromRows({{0.6, 0.8}, {1, 0}}, 4);
  ScoreResult r = maxsim_score(q, d);
  EXPECT_NEAR(r.score, 1.8, 1e-12);
  ASSERT_EQ(r.attributions.size(), 2u);
  EXPECT_EQ(r.attributions[0].doc_row, 1u);
  EXPECT_EQ(r.attributions[1].doc_row, 0u);
  EXPECT_NEAR(r.attributions[1].similarity, 0.8, 1e-12);
}

TEST(MaxSim, BeatsSingleVectorOnMultiAspectDoc) {
  auto q = FromRows({{0.6, 0.8}}, 4);
  auto d = FromRows({{1, 0}, {0.6, 0.8}}, 4);
  EXPECT_NEAR(maxsim_score(q, d).score, 1.0, 1e-12);
  EXPECT_NEAR(single_vector_score(q, d), 0.6, 1e-12);
  auto q2 = FromRows({{0.6, 0.8}, {0, 1}}, 4);
  EXPECT_NEAR(single_vector_score(q2, d), 0.6, 1e-12);
}

TEST(MaxSim, TiesGoToLowestDocRow) {
  auto q = FromRows({{1, 0}}, 4);
  auto d = FromRows({{0, 1}, {1, 0}, {1, 0}}, 4);
  EXPECT_EQ(maxsim_score(q, d).attributions[0].doc_row, 1u);
}

TEST(MaxSim, PaddingRowsNeverUsed) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    auto q = testing::RandomMatrix(rng, 10, 4, 1 + trial % 10);
    auto d = testing::RandomMatrix(rng, 10, 4, 1 + trial % 7);
    ScoreResult r = maxsim_score(q, d);
    EXPECT_EQ(r.attributions.size(), q.num_tokens());
    for (const auto& a : r.attributions) {
      EXPECT_TRUE(q.valid(a.query_row));
      EXPECT_TRUE(d.valid(a.doc_row));
    }
  }
}

TEST(MaxSim, Properties) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 2 + trial % 7;
    auto q = testing::RandomMatrix(rng, 12, dim, 1 + trial % 12);
    auto d = testing::RandomMatrix(rng, 12, dim, 1 + (trial * 7) % 12);
    const double s = maxsim_score(q, d).score;
    const double n = static_cast<double>(q.num_tokens());
    // Range.
    EXPECT_LE(s, n + 1e-9);
    EXPECT_GE(s, -n - 1e-9);
    // Self-score is the token count.
    EXPECT_NEAR(maxsim_score(q, q).score, n, 1e-9);
    // Adding a doc token never lowers the score.
    if (d.num_tokens() < d.pad_len()) {
      std::vector<std::vector<double>> rows = strip_padding(d);
      rows.push_back(testing::RandomUnit(rng, dim));
      EXPECT_GE(maxsim_score(q, FromRows(rows, 12)).score, s - 1e-12);
    }
    // Invariant to permuting doc rows.
    std::vector<std::vector<double>> drows = strip_padding(d);
    std::shuffle(drows.begin(), drows.end(), rng);
    EXPECT_NEAR(maxsim_score(q, FromRows(drows, 12)).score, s, 1e-12);
  }
}

TEST(MaxSim, MatchesNaiveOracle) {
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto q = testing::RandomMatrix(rng, 16, 8, 1 + trial % 16);
    auto d = testing::RandomMatrix(rng, 16, 8, 1 + (trial * 5) % 16);
    worst = std::max(worst, std::abs(maxsim_score(q, d).score - testing::NaiveMaxSim(q, d)));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(BatchScore, SinglePairMatchesDirect) {
  std::mt19937_64 rng(3);
  std::vector<TokenMatrix> q{testing::RandomMatrix(rng, 8, 4, 3)};
  std::vector<TokenMatrix> d{testing::RandomMatrix(rng, 8, 4, 5)};
  BatchScores b = batch_score(q, d, ScoreMode::kMaxSim);
  ASSERT_EQ(b.scores.rows(), 1u);
  EXPECT_EQ(b.scores(0, 0), maxsim_score(q[0], d[0]).score);
}

TEST(BatchScore, EntriesMatchPairwiseAndPermute) {
  std::mt19937_64 rng(4);
  const std::size_t n = 20;
  std::vector<TokenMatrix> q, d;
  for (std::size_t i = 0; i < n; ++i) {
    q.push_back(testing::RandomMatrix(rng, 8, 4, 1 + i % 8));
    d.push_back(testing::RandomMatrix(rng, 8, 4, 1 + (i * 3) % 8));
  }
  for (ScoreMode mode : {ScoreMode::kMaxSim, ScoreMode::kSingle}) {
    BatchScores b = batch_score(q, d, mode);
    EXPECT_EQ(b.scores, batch_score_matrix(q, d, mode));
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        const double direct = mode == ScoreMode::kMaxSim ? maxsim_score(q[u], d[v]).score
                                                         : single_vector_score(q[u], d[v]);
        EXPECT_NEAR(b.scores(u, v), direct, 1e-12);
      }
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<TokenMatrix> pq, pd;
    for (std::size_t i : perm) {
      pq.push_back(q[i]);
      pd.push_back(d[i]);
    }
    Matrix ps = batch_score_matrix(pq, pd, mode);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(ps(u, v), b.scores(perm[u], perm[v]));
    }
  }
}

}  // namespace
}  // namespace ofar
