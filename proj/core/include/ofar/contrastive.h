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

#include "ofar/token_matrix.h"

namespace ofar {

// kStandard: mean over queries of -log softmax(S_u / tau)_u with the positive
// in the denominator (InfoNCE).
// kVerbatim: -log sum_u [exp(S_uu / tau) / sum_{b != u} exp(S_ub / tau)],
// i.e. the printed objective with the positive excluded from its own
// denominator and the log taken outside the sum. Can be negative.
enum class LossMode { kStandard, kVerbatim };

// S is the B x B in-batch score matrix (row = query, column = document,
// diagonal = positives). Throws kBatchTooSmall (B < 1, or B < 2 for
// verbatim), kNonFinite and kInvalidArgument (non-square S, tau <= 0).
double contrastive_loss(const Matrix& scores, double tau, LossMode mode);

// dLoss/dS, same shape as S.
Matrix loss_gradient(const Matrix& scores, double tau, LossMode mode);

}  // namespace ofar
