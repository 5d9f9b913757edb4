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

#include "ofar/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "ofar/error.h"

namespace ofar {

namespace {

using nlohmann::json;

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << data;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

template <typename F>
void ForEachLine(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) f(line, line_no);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

CorpusItem ItemFromJson(const json& j, std::size_t line_no) {
  if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
  CorpusItem item;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw ParseError(line_no, "missing or empty string field 'id'");
  }
  item.id = id->get<std::string>();
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) {
    throw ParseError(line_no, "missing string field 'kind'");
  }
  if (*kind == "query") {
    item.kind = ItemKind::kQuery;
  } else if (*kind == "document") {
    item.kind = ItemKind::kDocument;
  } else {
    throw ParseError(line_no, "unknown kind '" + kind->get<std::string>() + "'");
  }
  if (auto text = j.find("text"); text != j.end() && !text->is_null()) {
    if (!text->is_string()) throw ParseError(line_no, "'text' must be a string");
    item.text = text->get<std::string>();
  }
  if (auto vis = j.find("visual_vecs"); vis != j.end() && !vis->is_null()) {
    if (!vis->is_array()) throw ParseError(line_no, "'visual_vecs' must be an array");
    std::vector<std::vector<double>> vecs;
    for (const auto& v : *vis) {
      if (!v.is_array()) throw ParseError(line_no, "'visual_vecs' entries must be arrays");
      std::vector<double> row;
      for (const auto& x : v) {
        if (!x.is_number()) throw ParseError(line_no, "visual vector entries must be numbers");
        row.push_back(x.get<double>());
      }
      vecs.push_back(std::move(row));
    }
    item.visual_vecs = std::move(vecs);
  }
  if (!item.has_text() && !item.has_visual()) {
    throw Error(ErrorCode::kMissingModalities, item.id);
  }
  return item;
}

json ItemToJson(const CorpusItem& item) {
  json j;
  j["id"] = item.id;
  if (item.text) j["text"] = *item.text;
  if (item.visual_vecs) j["visual_vecs"] = *item.visual_vecs;
  j["kind"] = item.kind == ItemKind::kQuery ? "query" : "document";
  return j;
}

json ParseJsonLine(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, e.what());
  }
}

}  // namespace

CorpusItem parse_corpus_line(std::string_view line, std::size_t line_no) {
  return ItemFromJson(ParseJsonLine(line, line_no), line_no);
}

std::vector<CorpusItem> parse_corpus(std::string_view jsonl) {
  std::vector<CorpusItem> items;
  std::unordered_set<std::string> seen;
  ForEachLine(jsonl, [&](std::string_view line, std::size_t line_no) {
    CorpusItem item = parse_corpus_line(line, line_no);
    if (!seen.insert(item.id).second) throw Error(ErrorCode::kDuplicateId, item.id);
    items.push_back(std::move(item));
  });
  return items;
}

std::vector<CorpusItem> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(ReadFile(path));
}

std::string corpus_item_to_json(const CorpusItem& item) { return ItemToJson(item).dump(); }

void write_corpus(const std::filesystem::path& path, const std::vector<CorpusItem>& items) {
  std::string out;
  for (const auto& item : items) {
    out += corpus_item_to_json(item);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<TrainPair> load_pairs(const std::filesystem::path& path) {
  std::vector<TrainPair> pairs;
  ForEachLine(ReadFile(path), [&](std::string_view line, std::size_t line_no) {
    json j = ParseJsonLine(line, line_no);
    if (!j.is_object() || !j.contains("query") || !j.contains("document")) {
      throw ParseError(line_no, "expected {\"query\": ..., \"document\": ...}");
    }
    pairs.push_back({ItemFromJson(j["query"], line_no), ItemFromJson(j["document"], line_no)});
  });
  return pairs;
}

void write_pairs(const std::filesystem::path& path, const std::vector<TrainPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j = {{"query", ItemToJson(p.query)}, {"document", ItemToJson(p.document)}};
    out += j.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

Qrels parse_qrels(std::string_view tsv) {
  Qrels qrels;
  ForEachLine(tsv, [&](std::string_view line, std::size_t line_no) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size() ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected query_id<TAB>doc_id");
    }
    qrels[std::string(line.substr(0, tab))].insert(std::string(line.substr(tab + 1)));
  });
  return qrels;
}

Qrels load_qrels(const std::filesystem::path& path) { return parse_qrels(ReadFile(path)); }

void write_qrels(const std::filesystem::path& path, const Qrels& qrels) {
  std::string out;
  for (const auto& [q, docs] : qrels) {
    for (const auto& d : docs) out += q + '\t' + d + '\n';
  }
  WriteFile(path, out);
}

}  // namespace ofar
