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

#include <optional>
#include <string>
#include <vector>

namespace ofar {

enum class ItemKind { kQuery, kDocument };

// One query or document. Screenshots enter only as precomputed visual
// vectors; at least one of text / visual_vecs must be present.
struct CorpusItem {
  std::string id;
  std::optional<std::string> text;
  std::optional<std::vector<std::vector<double>>> visual_vecs;
  ItemKind kind = ItemKind::kDocument;

  bool has_text() const { return text.has_value(); }
  bool has_visual() const { return visual_vecs.has_value() && !visual_vecs->empty(); }

  bool operator==(const CorpusItem&) const = default;
};

}  // namespace ofar
