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
#include <set>
#include <span>
#include <string>

namespace ofar {

// 1 / rank of the first relevant document within the top k, else 0.
// Throws kDuplicateInRanking, kInvalidArgument for k == 0.
double mrr_at_k(std::span<const std::string> ranking,
                const std::set<std::string>& relevant, std::size_t k);

// |relevant ∩ top-k| / |relevant|. Throws kEmptyRelevant,
// kDuplicateInRanking, kInvalidArgument for k == 0.
double recall_at_k(std::span<const std::string> ranking,
                   const std::set<std::string>& relevant, std::size_t k);

}  // namespace ofar
