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

#include "ofar/metrics.h"

#include <algorithm>
#include <unordered_set>

#include "ofar/error.h"

namespace ofar {

namespace {

void CheckRanking(std::span<const std::string> ranking, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ranking) {
    if (!seen.insert(id).second) throw Error(ErrorCode::kDuplicateInRanking, id);
  }
}

}  // namespace

double mrr_at_k(std::span<const std::string> ranking,
                const std::set<std::string>& relevant, std::size_t k) {
  CheckRanking(ranking, k);
  const std::size_t n = std::min(k, ranking.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double recall_at_k(std::span<const std::string> ranking,
                   const std::set<std::string>& relevant, std::size_t k) {
  if (relevant.empty()) throw Error(ErrorCode::kEmptyRelevant, "no relevant documents");
  CheckRanking(ranking, k);
  const std::size_t n = std::min(k, ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevant.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

}  // namespace ofar
