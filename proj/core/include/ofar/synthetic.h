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
#include <vector>

#include "ofar/corpus.h"
#include "ofar/corpus_item.h"
#include "ofar/trainer.h"

namespace ofar {

// Desk-scale stand-in for a query/evidence corpus. Every topic owns a
// disjoint slice of the vocabulary with its own word distribution; every
// document draws its words from one topic. A query is a sample of its
// source document's words, each replaced by a uniformly random vocabulary
// word with probability noise_rate.
//
// With visual_dim > 0 every item also carries visual vectors: each topic has
// a prototype, each document a private offset from it, and the query's
// vectors are its source document's vector plus Gaussian noise of standard
// deviation visual_noise.
struct SynthSpec {
  std::size_t n_topics = 50;
  std::size_t n_docs = 1000;
  std::size_t n_queries = 200;
  std::size_t tokens_per_item = 16;
  std::size_t query_tokens = 8;
  std::size_t vocab = 2500;
  double noise_rate = 0.2;
  // Dirichlet concentration of each topic's word distribution; larger is
  // flatter.
  double topic_concentration = 1.0;
  std::uint64_t seed = 7;
  // Extra queries (disjoint from the evaluation queries) paired with their
  // source documents as training data.
  std::size_t n_train_queries = 0;
  std::size_t visual_dim = 0;
  std::size_t visual_per_item = 2;
  double visual_spread = 1.0;
  double visual_noise = 1.0;

  void Validate() const;
};

struct SynthCorpus {
  std::vector<CorpusItem> documents;
  std::vector<CorpusItem> queries;
  Qrels qrels;
  std::vector<TrainPair> train_pairs;
};

SynthCorpus generate_synthetic(const SynthSpec& spec);

}  // namespace ofar
