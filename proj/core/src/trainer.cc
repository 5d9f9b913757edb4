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

#include "ofar/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "ofar/error.h"

namespace ofar {

void TrainConfig::Validate() const {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
  if (!(lr >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lr must be >= 0");
  const std::size_t min_b = loss_mode == LossMode::kVerbatim ? 2 : 1;
  if (batch_size < min_b) {
    throw Error(ErrorCode::kBatchTooSmall, "batch_size " + std::to_string(batch_size) +
                                               " below minimum " + std::to_string(min_b));
  }
}

std::string FormatStatsRecords(const EpochStats& stats) {
  std::ostringstream out;
  for (const auto& b : stats.batches) {
    nlohmann::json rec = {{"epoch", b.epoch}, {"batch", b.batch}, {"loss", b.loss},
                          {"wall_ms", b.wall_ms}};
    out << rec.dump() << '\n';
  }
  return out.str();
}

void Adam::Step(EncoderParams& params, const EncoderParams& grads, double lr) {
  if (!initialized_) {
    first_moment_ = EncoderParams::Zeros(params.shape, params.role);
    second_moment_ = EncoderParams::Zeros(params.shape, params.role);
    initialized_ = true;
  }
  ++step_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto update = [&](Matrix& p, const Matrix& g, Matrix& m, Matrix& v) {
    auto pd = p.data();
    auto gd = g.data();
    auto md = m.data();
    auto vd = v.data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      md[i] = beta1_ * md[i] + (1.0 - beta1_) * gd[i];
      vd[i] = beta2_ * vd[i] + (1.0 - beta2_) * gd[i] * gd[i];
      const double mhat = md[i] / bias1;
      const double vhat = vd[i] / bias2;
      pd[i] -= lr * mhat / (std::sqrt(vhat) + epsilon_);
    }
  };
  update(params.embed_table, grads.embed_table, first_moment_.embed_table,
         second_moment_.embed_table);
  update(params.projection, grads.projection, first_moment_.projection,
         second_moment_.projection);
  update(params.visual_projection, grads.visual_projection,
         first_moment_.visual_projection, second_moment_.visual_projection);
}

namespace {

struct EncodedBatch {
  std::vector<EncodedItem> items;
  std::vector<EncodeTrace> traces;
  std::vector<TokenMatrix> matrices;
};

EncodedBatch EncodeSide(std::span<const TrainPair> batch, bool query_side,
                        const EncoderParams& params, const CoreConfig& core,
                        bool want_trace) {
  EncodedBatch out;
  out.items.reserve(batch.size());
  out.traces.resize(want_trace ? batch.size() : 0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const CorpusItem& item = query_side ? batch[i].query : batch[i].document;
    out.items.push_back(encode(item, params, core, want_trace ? &out.traces[i] : nullptr));
    out.matrices.push_back(out.items.back().matrix);
  }
  return out;
}

}  // namespace

double compute_batch_loss(std::span<const TrainPair> batch,
                          const EncoderParams& query_encoder,
                          const EncoderParams& doc_encoder,
                          const CoreConfig& core, const TrainConfig& cfg) {
  auto q = EncodeSide(batch, true, query_encoder, core, false);
  auto d = EncodeSide(batch, false, doc_encoder, core, false);
  Matrix s = batch_score_matrix(q.matrices, d.matrices, cfg.score_mode);
  return contrastive_loss(s, cfg.tau, cfg.loss_mode);
}

double compute_batch_gradients(std::span<const TrainPair> batch,
                               const EncoderParams& query_encoder,
                               const EncoderParams& doc_encoder,
                               const CoreConfig& core, const TrainConfig& cfg,
                               EncoderParams& grad_query, EncoderParams& grad_doc) {
  const std::size_t n = batch.size();
  auto q = EncodeSide(batch, true, query_encoder, core, true);
  auto d = EncodeSide(batch, false, doc_encoder, core, true);
  BatchScores scores = batch_score(q.matrices, d.matrices, cfg.score_mode);
  const double loss = contrastive_loss(scores.scores, cfg.tau, cfg.loss_mode);
  const Matrix g = loss_gradient(scores.scores, cfg.tau, cfg.loss_mode);

  // dLoss/dRows for every encoded item.
  std::vector<Matrix> gq(n, Matrix(core.pad_len, core.dim));
  std::vector<Matrix> gd(n, Matrix(core.pad_len, core.dim));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t b = 0; b < n; ++b) {
      const double w = g(u, b);
      if (w == 0.0) continue;
      const TokenMatrix& qm = q.matrices[u];
      const TokenMatrix& dm = d.matrices[b];
      if (cfg.score_mode == ScoreMode::kSingle) {
        const std::size_t qi = qm.token_indices().front();
        const std::size_t dj = dm.token_indices().front();
        auto qr = qm.row(qi);
        auto dr = dm.row(dj);
        auto gqr = gq[u].row(qi);
        auto gdr = gd[b].row(dj);
        for (std::size_t c = 0; c < core.dim; ++c) {
          gqr[c] += w * dr[c];
          gdr[c] += w * qr[c];
        }
        continue;
      }
      // Subgradient of the max: everything flows to the argmax row.
      for (const auto& a : scores.attributions[u * n + b]) {
        auto qr = qm.row(a.query_row);
        auto dr = dm.row(a.doc_row);
        auto gqr = gq[u].row(a.query_row);
        auto gdr = gd[b].row(a.doc_row);
        for (std::size_t c = 0; c < core.dim; ++c) {
          gqr[c] += w * dr[c];
          gdr[c] += w * qr[c];
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    backprop_encoder(q.traces[i], q.items[i], gq[i], query_encoder, grad_query);
  }
  for (std::size_t i = 0; i < n; ++i) {
    backprop_encoder(d.traces[i], d.items[i], gd[i], doc_encoder, grad_doc);
  }
  return loss;
}

ContrastiveTrainer::ContrastiveTrainer(EncoderParams query_encoder,
                                       EncoderParams doc_encoder, CoreConfig core,
                                       TrainConfig cfg)
    : query_(std::move(query_encoder)),
      doc_(std::move(doc_encoder)),
      core_(core),
      cfg_(cfg),
      adam_query_(cfg.beta1, cfg.beta2, cfg.epsilon),
      adam_doc_(cfg.beta1, cfg.beta2, cfg.epsilon) {
  core_.Validate();
  cfg_.Validate();
  query_.Validate();
  if (cfg_.tie_weights) {
    doc_ = EncoderParams{};
  } else {
    doc_.Validate();
  }
  grad_query_ = EncoderParams::Zeros(query_.shape, query_.role);
  if (!cfg_.tie_weights) grad_doc_ = EncoderParams::Zeros(doc_.shape, doc_.role);
}

EpochStats ContrastiveTrainer::RunEpoch(std::span<const TrainPair> pairs) {
  if (pairs.size() < cfg_.batch_size) {
    throw Error(ErrorCode::kInsufficientData,
                std::to_string(pairs.size()) + " pairs for batch size " +
                    std::to_string(cfg_.batch_size));
  }
  ++epoch_;
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg_.seed ^ (0x9e3779b97f4a7c15ull * epoch_));
  std::shuffle(order.begin(), order.end(), rng);

  EpochStats stats;
  stats.epoch = epoch_;
  const std::size_t n_batches = pairs.size() / cfg_.batch_size;
  std::vector<TrainPair> batch(cfg_.batch_size);
  double total = 0.0;
  for (std::size_t bi = 0; bi < n_batches; ++bi) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < cfg_.batch_size; ++i) {
      batch[i] = pairs[order[bi * cfg_.batch_size + i]];
    }
    grad_query_.ForEachTensor([](Matrix& m) { m.fill(0.0); });
    EncoderParams& doc_grads = cfg_.tie_weights ? grad_query_ : grad_doc_;
    if (!cfg_.tie_weights) doc_grads.ForEachTensor([](Matrix& m) { m.fill(0.0); });
    const EncoderParams& doc_params = cfg_.tie_weights ? query_ : doc_;
    const double loss = compute_batch_gradients(batch, query_, doc_params, core_, cfg_,
                                                grad_query_, doc_grads);
    adam_query_.Step(query_, grad_query_, cfg_.lr);
    if (!cfg_.tie_weights) adam_doc_.Step(doc_, grad_doc_, cfg_.lr);
    const auto end = std::chrono::steady_clock::now();
    total += loss;
    stats.batches.push_back(
        {epoch_, bi, loss, std::chrono::duration<double, std::milli>(end - start).count()});
  }
  stats.mean_loss = total / static_cast<double>(n_batches);
  return stats;
}

TrainEpochResult train_epoch(std::span<const TrainPair> pairs,
                             EncoderParams query_encoder, EncoderParams doc_encoder,
                             const CoreConfig& core, const TrainConfig& cfg) {
  ContrastiveTrainer trainer(std::move(query_encoder), std::move(doc_encoder), core, cfg);
  EpochStats stats = trainer.RunEpoch(pairs);
  return {trainer.query_encoder(), trainer.doc_encoder(), std::move(stats)};
}

}  // namespace ofar
