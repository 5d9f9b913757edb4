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
#include <span>
#include <string>
#include <vector>

#include "ofar/contrastive.h"
#include "ofar/corpus_item.h"
#include "ofar/embedding.h"
#include "ofar/encoder.h"
#include "ofar/maxsim.h"

namespace ofar {

struct TrainConfig {
  std::size_t batch_size = 32;
  double tau = 1.0;
  double lr = 1e-4;
  std::size_t epochs = 1;
  LossMode loss_mode = LossMode::kStandard;
  ScoreMode score_mode = ScoreMode::kMaxSim;
  std::uint64_t seed = 0;
  // Share one parameter set between the query and document sides.
  bool tie_weights = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
};

struct TrainPair {
  CorpusItem query;
  CorpusItem document;
};

struct BatchStats {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double loss = 0.0;
  double wall_ms = 0.0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::vector<BatchStats> batches;
};

// One JSON object per batch: {"epoch","batch","loss","wall_ms"}.
std::string FormatStatsRecords(const EpochStats& stats);

class Adam {
 public:
  Adam(double beta1, double beta2, double epsilon)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void Step(EncoderParams& params, const EncoderParams& grads, double lr);

  std::uint64_t steps() const { return step_; }

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::uint64_t step_ = 0;
  bool initialized_ = false;
  EncoderParams first_moment_;
  EncoderParams second_moment_;
};

// Forward + backward for one batch of in-batch-negative pairs. Gradients are
// accumulated into grad_query / grad_doc (which may alias when weights are
// tied). Returns the batch loss.
double compute_batch_gradients(std::span<const TrainPair> batch,
                               const EncoderParams& query_encoder,
                               const EncoderParams& doc_encoder,
                               const CoreConfig& core, const TrainConfig& cfg,
                               EncoderParams& grad_query, EncoderParams& grad_doc);

// Loss only, no gradients.
double compute_batch_loss(std::span<const TrainPair> batch,
                          const EncoderParams& query_encoder,
                          const EncoderParams& doc_encoder,
                          const CoreConfig& core, const TrainConfig& cfg);

// Owns the parameters and optimizer state across epochs.
class ContrastiveTrainer {
 public:
  ContrastiveTrainer(EncoderParams query_encoder, EncoderParams doc_encoder,
                     CoreConfig core, TrainConfig cfg);

  // Shuffles with (seed, epoch), drops the incomplete trailing batch and
  // applies one Adam step per full batch. Throws kInsufficientData when
  // fewer pairs than batch_size are given.
  EpochStats RunEpoch(std::span<const TrainPair> pairs);

  const EncoderParams& query_encoder() const { return query_; }
  const EncoderParams& doc_encoder() const { return cfg_.tie_weights ? query_ : doc_; }
  std::size_t epochs_run() const { return epoch_; }

 private:
  EncoderParams query_;
  EncoderParams doc_;
  CoreConfig core_;
  TrainConfig cfg_;
  Adam adam_query_;
  Adam adam_doc_;
  EncoderParams grad_query_;
  EncoderParams grad_doc_;
  std::size_t epoch_ = 0;
};

struct TrainEpochResult {
  EncoderParams query_encoder;
  EncoderParams doc_encoder;
  EpochStats stats;
};

// Single epoch with fresh optimizer state.
TrainEpochResult train_epoch(std::span<const TrainPair> pairs,
                             EncoderParams query_encoder, EncoderParams doc_encoder,
                             const CoreConfig& core, const TrainConfig& cfg);

}  // namespace ofar
