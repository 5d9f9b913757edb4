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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ofar/corpus.h"
#include "ofar/corpus_item.h"
#include "ofar/embedding.h"
#include "ofar/encoder.h"
#include "ofar/index.h"

namespace ofar {

enum class ModalityMode { kAll, kVision, kText };

// Which encoders and scorer an evaluation uses:
//   kFull        trained encoders, MaxSim ranking
//   kNoMaxSim    trained encoders, first-token (summary) ranking
//   kFixEncoder  seeded random encoders that never saw training, MaxSim
enum class Variant { kFull, kNoMaxSim, kFixEncoder };

std::string_view ModalityName(ModalityMode mode);
std::string_view VariantName(Variant variant);
// Accepts "All"/"Vision"/"Text" (any case); throws kInvalidArgument.
ModalityMode ParseModality(std::string_view name);
// Accepts "full", "no_maxsim", "fix_encoder"; throws kInvalidArgument.
Variant ParseVariant(std::string_view name);

struct FilteredItem {
  CorpusItem item;
  // The filter removed every modality; the item must not be scored.
  bool skipped = false;
};

// Vision strips text, Text strips visual vectors, All is the identity.
FilteredItem apply_modality_filter(const CorpusItem& item, ModalityMode mode);

struct QueryMetrics {
  std::string query_id;
  double mrr_at_10 = 0.0;
  double r_at_10 = 0.0;
  double r_at_50 = 0.0;
};

struct MetricsReport {
  std::string variant;
  std::string modality;
  // Modality filters apply to queries and documents alike.
  std::string ablation_scope = "queries+documents";
  double mrr_at_10 = 0.0;
  double r_at_10 = 0.0;
  double r_at_50 = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;
  std::vector<QueryMetrics> per_query;
};

// Unweighted means of the per-query metrics over the queries present in both
// maps. Queries without judgments count as skipped.
MetricsReport evaluate_rankings(const std::map<std::string, std::vector<std::string>>& rankings,
                                const Qrels& qrels);

struct EvalInputs {
  std::span<const CorpusItem> documents;
  std::span<const CorpusItem> queries;
  const Qrels* qrels = nullptr;
  // Trained encoders for kFull / kNoMaxSim.
  const EncoderParams* query_encoder = nullptr;
  const EncoderParams* doc_encoder = nullptr;
  CoreConfig core;
  // Shape and seed of the untrained encoders used by kFixEncoder. When a
  // trained encoder is supplied its shape takes precedence.
  EncoderShape fixed_shape;
  std::uint64_t fixed_seed = 1;
  // Prebuilt index over `documents` with `doc_encoder`; reused by kFull and
  // kNoMaxSim in kAll mode, otherwise documents are re-encoded.
  const RetrievalIndex* index = nullptr;
  // Approximate MaxSim search with this probe instead of exact search.
  std::optional<std::size_t> probe;
};

// Throws kMissingArtifacts when qrels or the variant's encoders are absent.
MetricsReport run_eval(const EvalInputs& inputs, Variant variant, ModalityMode mode);

// Fixed-width table of the aggregate metrics.
std::string FormatReportTable(std::span<const MetricsReport> reports);
// key=value records, one per line, aggregate first then per query.
std::string FormatReportRecords(const MetricsReport& report);

}  // namespace ofar
