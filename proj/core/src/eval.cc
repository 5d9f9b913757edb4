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

#include "ofar/eval.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "ofar/error.h"
#include "ofar/metrics.h"

namespace ofar {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::size_t kDepth = 50;

}  // namespace

std::string_view ModalityName(ModalityMode mode) {
  switch (mode) {
    case ModalityMode::kAll: return "All";
    case ModalityMode::kVision: return "Vision";
    case ModalityMode::kText: return "Text";
  }
  return "?";
}

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kFull: return "full";
    case Variant::kNoMaxSim: return "no_maxsim";
    case Variant::kFixEncoder: return "fix_encoder";
  }
  return "?";
}

ModalityMode ParseModality(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "all") return ModalityMode::kAll;
  if (s == "vision") return ModalityMode::kVision;
  if (s == "text") return ModalityMode::kText;
  throw Error(ErrorCode::kInvalidArgument, "unknown modality '" + std::string(name) + "'");
}

Variant ParseVariant(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "full") return Variant::kFull;
  if (s == "no_maxsim") return Variant::kNoMaxSim;
  if (s == "fix_encoder") return Variant::kFixEncoder;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

FilteredItem apply_modality_filter(const CorpusItem& item, ModalityMode mode) {
  FilteredItem out{item, false};
  if (mode == ModalityMode::kVision) out.item.text.reset();
  if (mode == ModalityMode::kText) out.item.visual_vecs.reset();
  out.skipped = !out.item.has_text() && !out.item.has_visual();
  return out;
}

MetricsReport evaluate_rankings(
    const std::map<std::string, std::vector<std::string>>& rankings, const Qrels& qrels) {
  MetricsReport report;
  for (const auto& [qid, ranking] : rankings) {
    auto rel = qrels.find(qid);
    if (rel == qrels.end() || rel->second.empty()) {
      ++report.n_skipped;
      continue;
    }
    QueryMetrics m{qid, mrr_at_k(ranking, rel->second, 10),
                   recall_at_k(ranking, rel->second, 10),
                   recall_at_k(ranking, rel->second, 50)};
    report.per_query.push_back(m);
  }
  // Fixed accumulation order: per_query is sorted by query id (map order).
  for (const auto& m : report.per_query) {
    report.mrr_at_10 += m.mrr_at_10;
    report.r_at_10 += m.r_at_10;
    report.r_at_50 += m.r_at_50;
  }
  report.n_evaluated = report.per_query.size();
  if (report.n_evaluated > 0) {
    const double n = static_cast<double>(report.n_evaluated);
    report.mrr_at_10 /= n;
    report.r_at_10 /= n;
    report.r_at_50 /= n;
  }
  return report;
}

MetricsReport run_eval(const EvalInputs& inputs, Variant variant, ModalityMode mode) {
  if (inputs.qrels == nullptr) throw Error(ErrorCode::kMissingArtifacts, "qrels");
  std::optional<EncoderParams> random_query;
  std::optional<EncoderParams> random_doc;
  const EncoderParams* q_enc = inputs.query_encoder;
  const EncoderParams* d_enc = inputs.doc_encoder;
  if (variant == Variant::kFixEncoder) {
    EncoderShape shape = inputs.fixed_shape;
    if (inputs.query_encoder != nullptr) shape = inputs.query_encoder->shape;
    random_query = EncoderParams::Random(shape, EncoderRole::kQuery, inputs.fixed_seed);
    random_doc = EncoderParams::Random(shape, EncoderRole::kDocument, inputs.fixed_seed + 1);
    q_enc = &*random_query;
    d_enc = &*random_doc;
  }
  const bool reuse_index =
      inputs.index != nullptr && mode == ModalityMode::kAll && variant != Variant::kFixEncoder;
  // A prebuilt index already carries the document side.
  if (q_enc == nullptr || (d_enc == nullptr && !reuse_index)) {
    throw Error(ErrorCode::kMissingArtifacts, "trained encoders required for variant " +
                                                  std::string(VariantName(variant)));
  }

  const RetrievalIndex* index = nullptr;
  std::optional<RetrievalIndex> built;
  if (reuse_index) {
    index = inputs.index;
  } else {
    std::vector<EncodedItem> docs;
    docs.reserve(inputs.documents.size());
    for (const auto& doc : inputs.documents) {
      FilteredItem f = apply_modality_filter(doc, mode);
      if (f.skipped) continue;
      try {
        docs.push_back(encode(f.item, *d_enc, inputs.core));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyItem) throw;
      }
    }
    if (docs.empty()) throw Error(ErrorCode::kMissingArtifacts, "no documents survive the filter");
    built = RetrievalIndex::Build(docs);
    index = &*built;
  }

  const ScoreMode score_mode =
      variant == Variant::kNoMaxSim ? ScoreMode::kSingle : ScoreMode::kMaxSim;
  CoreConfig core = inputs.core;
  core.pad_len = index->pad_len();

  std::map<std::string, std::vector<std::string>> rankings;
  std::size_t filtered_out = 0;
  for (const auto& query : inputs.queries) {
    FilteredItem f = apply_modality_filter(query, mode);
    if (f.skipped) {
      ++filtered_out;
      continue;
    }
    std::optional<EncodedItem> encoded;
    try {
      encoded = encode(f.item, *q_enc, core);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyItem) throw;
      ++filtered_out;
      continue;
    }
    RankedHits hits = (inputs.probe && score_mode == ScoreMode::kMaxSim)
                          ? index->SearchApprox(encoded->matrix, kDepth, *inputs.probe)
                          : index->SearchExact(encoded->matrix, kDepth, score_mode);
    auto& ranking = rankings[query.id];
    for (const auto& h : hits.entries) ranking.push_back(h.doc_id);
  }
  MetricsReport report = evaluate_rankings(rankings, *inputs.qrels);
  report.n_skipped += filtered_out;
  report.variant = VariantName(variant);
  report.modality = ModalityName(mode);
  return report;
}

std::string FormatReportTable(std::span<const MetricsReport> reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-8s %8s %8s %8s %6s %6s\n", "variant",
                "modality", "MRR@10", "R@10", "R@50", "n", "skip");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-12s %-8s %8.4f %8.4f %8.4f %6zu %6zu\n",
                  r.variant.c_str(), r.modality.c_str(), r.mrr_at_10, r.r_at_10, r.r_at_50,
                  r.n_evaluated, r.n_skipped);
    out << line;
  }
  return out.str();
}

std::string FormatReportRecords(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "variant=" << r.variant << '\n'
      << "modality=" << r.modality << '\n'
      << "ablation_scope=" << r.ablation_scope << '\n'
      << "mrr_at_10=" << r.mrr_at_10 << '\n'
      << "r_at_10=" << r.r_at_10 << '\n'
      << "r_at_50=" << r.r_at_50 << '\n'
      << "n_evaluated=" << r.n_evaluated << '\n'
      << "n_skipped=" << r.n_skipped << '\n';
  for (const auto& q : r.per_query) {
    out << "query=" << q.query_id << " mrr_at_10=" << q.mrr_at_10 << " r_at_10=" << q.r_at_10
        << " r_at_50=" << q.r_at_50 << '\n';
  }
  return out.str();
}

}  // namespace ofar
