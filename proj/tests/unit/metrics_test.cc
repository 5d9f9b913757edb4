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

#include <random>

#include "ofar/error.h"
#include "ofar/eval.h"
#include "ofar/metrics.h"

namespace ofar {
namespace {

std::vector<std::string> Ranking(std::size_t n) {
  std::vector<std::string> r;
  for (std::size_t i = 0; i < n; ++i) r.push_back("d" + std::to_string(i));
  return r;
}

TEST(MrrAtK, Definition) {
  auto r = Ranking(20);
  EXPECT_DOUBLE_EQ(mrr_at_k(r, {"d2"}, 10), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mrr_at_k(r, {"d15"}, 10), 0.0);
  EXPECT_DOUBLE_EQ(mrr_at_k(r, {"d0"}, 10), 1.0);
  EXPECT_DOUBLE_EQ(mrr_at_k(r, {"d4", "d1"}, 10), 0.5);
  EXPECT_DOUBLE_EQ(mrr_at_k(r, {"nope"}, 10), 0.0);
}

TEST(RecallAtK, Definition) {
  auto r = Ranking(20);
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"d3"}, 10), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"d3", "d12"}, 10), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"d3", "d19"}, 50), 1.0);
}

TEST(Metrics, Errors) {
  std::vector<std::string> dup{"a", "b", "a"};
  auto code = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code([&] { mrr_at_k(dup, {"a"}, 10); }), ErrorCode::kDuplicateInRanking);
  EXPECT_EQ(code([&] { recall_at_k(dup, {"a"}, 10); }), ErrorCode::kDuplicateInRanking);
  auto r = Ranking(3);
  EXPECT_EQ(code([&] { recall_at_k(r, {}, 10); }), ErrorCode::kEmptyRelevant);
  EXPECT_EQ(code([&] { mrr_at_k(r, {"d0"}, 0); }), ErrorCode::kInvalidArgument);
}

TEST(Metrics, RandomRankingsStayInRange) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    auto r = Ranking(1 + trial % 80);
    std::shuffle(r.begin(), r.end(), rng);
    std::set<std::string> rel;
    std::uniform_int_distribution<std::size_t> pick(0, 99);
    const std::size_t n_rel = 1 + trial % 4;
    while (rel.size() < n_rel) rel.insert("d" + std::to_string(pick(rng)));
    const double mrr = mrr_at_k(r, rel, 10);
    const double r10 = recall_at_k(r, rel, 10);
    const double r50 = recall_at_k(r, rel, 50);
    ASSERT_GE(mrr, 0.0);
    ASSERT_LE(mrr, 1.0);
    ASSERT_LE(r10, r50);
    ASSERT_GE(r10, 0.0);
    ASSERT_LE(r50, 1.0);
    // Relabeling ids consistently changes nothing.
    std::vector<std::string> r2;
    for (const auto& id : r) r2.push_back("x_" + id);
    std::set<std::string> rel2;
    for (const auto& id : rel) rel2.insert("x_" + id);
    ASSERT_EQ(mrr_at_k(r2, rel2, 10), mrr);
    ASSERT_EQ(recall_at_k(r2, rel2, 50), r50);
  }
}

TEST(EvaluateRankings, PerfectAndReversedFixtures) {
  Qrels qrels;
  std::map<std::string, std::vector<std::string>> perfect, reversed;
  for (int q = 0; q < 10; ++q) {
    const std::string qid = "q" + std::to_string(q);
    const std::string rel = "d" + std::to_string(q);
    qrels[qid] = {rel};
    std::vector<std::string> rest;
    for (int d = 0; d < 100; ++d) {
      if (d != q) rest.push_back("d" + std::to_string(d));
    }
    perfect[qid] = {rel};
    perfect[qid].insert(perfect[qid].end(), rest.begin(), rest.end());
    // Relevant doc at rank 50.
    reversed[qid] = std::vector<std::string>(rest.begin(), rest.begin() + 49);
    reversed[qid].push_back(rel);
    reversed[qid].insert(reversed[qid].end(), rest.begin() + 49, rest.end());
  }
  MetricsReport p = evaluate_rankings(perfect, qrels);
  EXPECT_EQ(p.mrr_at_10, 1.0);
  EXPECT_EQ(p.r_at_10, 1.0);
  EXPECT_EQ(p.r_at_50, 1.0);
  EXPECT_EQ(p.n_evaluated, 10u);
  MetricsReport r = evaluate_rankings(reversed, qrels);
  EXPECT_EQ(r.r_at_50, 1.0);
  EXPECT_EQ(r.r_at_10, 0.0);
  EXPECT_EQ(r.mrr_at_10, 0.0);
}

}  // namespace
}  // namespace ofar
