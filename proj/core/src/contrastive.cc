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

#include "ofar/contrastive.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ofar/error.h"

namespace ofar {

namespace {

void Check(const Matrix& s, double tau, LossMode mode) {
  if (s.rows() != s.cols()) {
    throw Error(ErrorCode::kDimMismatch, "score matrix must be square");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be positive and finite");
  }
  const std::size_t min_b = mode == LossMode::kVerbatim ? 2 : 1;
  if (s.rows() < min_b) {
    throw Error(ErrorCode::kBatchTooSmall,
                "batch of " + std::to_string(s.rows()) + " needs at least " +
                    std::to_string(min_b));
  }
  for (double v : s.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite score");
  }
}

// log sum_b exp(x_b) over b != skip (skip = npos includes all).
double LogSumExp(std::span<const double> x, double scale, std::size_t skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < x.size(); ++b) {
    if (b != skip) m = std::max(m, x[b] * scale);
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) {
    if (b != skip) acc += std::exp(x[b] * scale - m);
  }
  return m + std::log(acc);
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Per-query log ratio of the verbatim objective:
// a_u = S_uu / tau - log sum_{b != u} exp(S_ub / tau).
std::vector<double> VerbatimLogRatios(const Matrix& s, double inv_tau) {
  std::vector<double> a(s.rows());
  for (std::size_t u = 0; u < s.rows(); ++u) {
    a[u] = s(u, u) * inv_tau - LogSumExp(s.row(u), inv_tau, u);
  }
  return a;
}

}  // namespace

double contrastive_loss(const Matrix& s, double tau, LossMode mode) {
  Check(s, tau, mode);
  const double inv_tau = 1.0 / tau;
  const std::size_t batch = s.rows();
  if (mode == LossMode::kStandard) {
    double total = 0.0;
    for (std::size_t u = 0; u < batch; ++u) {
      total += LogSumExp(s.row(u), inv_tau, kNone) - s(u, u) * inv_tau;
    }
    return total / static_cast<double>(batch);
  }
  const auto a = VerbatimLogRatios(s, inv_tau);
  return -LogSumExp(a, 1.0, kNone);
}

Matrix loss_gradient(const Matrix& s, double tau, LossMode mode) {
  Check(s, tau, mode);
  const double inv_tau = 1.0 / tau;
  const std::size_t batch = s.rows();
  Matrix g(batch, batch);
  if (mode == LossMode::kStandard) {
    const double scale = inv_tau / static_cast<double>(batch);
    for (std::size_t u = 0; u < batch; ++u) {
      const double lse = LogSumExp(s.row(u), inv_tau, kNone);
      for (std::size_t b = 0; b < batch; ++b) {
        const double p = std::exp(s(u, b) * inv_tau - lse);
        g(u, b) = (p - (u == b ? 1.0 : 0.0)) * scale;
      }
    }
    return g;
  }
  // L = -LSE_u(a_u); dL/da_u = -w_u with w = softmax(a).
  // da_u/dS_uu = 1/tau; da_u/dS_ub = -p_ub / tau for b != u, where p_u. is
  // the softmax over the off-diagonal entries of row u.
  const auto a = VerbatimLogRatios(s, inv_tau);
  const double lse_a = LogSumExp(a, 1.0, kNone);
  for (std::size_t u = 0; u < batch; ++u) {
    const double w = std::exp(a[u] - lse_a);
    const double lse_neg = LogSumExp(s.row(u), inv_tau, u);
    for (std::size_t b = 0; b < batch; ++b) {
      if (b == u) {
        g(u, b) = -w * inv_tau;
      } else {
        g(u, b) = w * std::exp(s(u, b) * inv_tau - lse_neg) * inv_tau;
      }
    }
  }
  return g;
}

}  // namespace ofar
