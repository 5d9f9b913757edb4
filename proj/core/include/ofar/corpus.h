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
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ofar/corpus_item.h"
#include "ofar/trainer.h"

namespace ofar {

// JSON-lines corpus: one object per line with "id", optional "text",
// optional "visual_vecs" (array of number arrays) and "kind"
// ("query" | "document"). Blank lines are skipped.
//
// Throws ParseError(line) for malformed lines, kMissingModalities when an
// item has neither text nor visual vectors and kDuplicateId for repeated ids.
std::vector<CorpusItem> load_corpus(const std::filesystem::path& path);
std::vector<CorpusItem> parse_corpus(std::string_view jsonl);
CorpusItem parse_corpus_line(std::string_view line, std::size_t line_no);

std::string corpus_item_to_json(const CorpusItem& item);
void write_corpus(const std::filesystem::path& path, const std::vector<CorpusItem>& items);

// Training pairs: one {"query": item, "document": item} object per line.
std::vector<TrainPair> load_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, const std::vector<TrainPair>& pairs);

// query id -> relevant document ids.
using Qrels = std::map<std::string, std::set<std::string>>;

// Tab-separated `query_id<TAB>doc_id` lines.
Qrels load_qrels(const std::filesystem::path& path);
Qrels parse_qrels(std::string_view tsv);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

}  // namespace ofar
