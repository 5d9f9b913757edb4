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

#include "ofar/embedding.h"

#include <cmath>
#include <string>

#include "ofar/error.h"

namespace ofar {

void CoreConfig::Validate() const {
  if (dim < 2) {
    throw Error(ErrorCode::kInvalidArgument, "dim must be >= 2");
  }
  if (pad_len < 1) {
    throw Error(ErrorCode::kInvalidArgument, "pad_len must be >= 1");
  }
}

std::vector<std::size_t> TokenMatrix::token_indices() const {
  std::vector<std::size_t> out;
  out.reserve(num_tokens_);
  for (std::size_t r = 0; r < mask_.size(); ++r) {
    if (mask_[r]) out.push_back(r);
  }
  return out;
}

TokenMatrix TokenMatrix::FromUnitRows(Matrix rows, std::vector<bool> mask) {
  if (mask.size() != rows.rows()) {
    throw Error(ErrorCode::kDimMismatch, "mask length differs from row count");
  }
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    double sq = 0.0;
    for (double v : rows.row(r)) sq += v * v;
    if (mask[r]) {
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(r) + " is not unit-norm");
      }
      ++count;
    } else if (sq != 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "padding row " + std::to_string(r) + " is not zero");
    }
  }
  if (count == 0) throw Error(ErrorCode::kEmptyMask, "no valid rows");
  TokenMatrix m;
  m.rows_ = std::move(rows);
  m.mask_ = std::move(mask);
  m.num_tokens_ = count;
  return m;
}

TokenMatrix l2_normalize_rows(const Matrix& raw, const std::vector<bool>& mask) {
  if (mask.size() != raw.rows()) {
    throw Error(ErrorCode::kDimMismatch, "mask length differs from row count");
  }
  TokenMatrix out;
  out.rows_ = Matrix(raw.rows(), raw.cols());
  out.mask_ = mask;
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    if (!mask[r]) continue;
    auto src = raw.row(r);
    double sq = 0.0;
    for (double v : src) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > kZeroRowEpsilon)) {
      throw Error(ErrorCode::kZeroRow,
                  "row " + std::to_string(r) + " has norm " + std::to_string(norm));
    }
    auto dst = out.rows_.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / norm;
    ++out.num_tokens_;
  }
  if (out.num_tokens_ == 0) {
    throw Error(ErrorCode::kEmptyMask, "no valid rows");
  }
  return out;
}

PaddedRows pad_and_mask(std::span<const std::vector<double>> tokens,
                        std::size_t pad_len) {
  if (tokens.empty()) throw Error(ErrorCode::kEmpty, "no tokens to pad");
  if (tokens.size() > pad_len) {
    throw Error(ErrorCode::kTooLong, std::to_string(tokens.size()) +
                                         " tokens exceed pad length " +
                                         std::to_string(pad_len));
  }
  const std::size_t dim = tokens.front().size();
  PaddedRows out{Matrix(pad_len, dim), std::vector<bool>(pad_len, false)};
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    if (tokens[r].size() != dim) {
      throw Error(ErrorCode::kDimMismatch, "ragged token vectors");
    }
    std::copy(tokens[r].begin(), tokens[r].end(), out.rows.row(r).begin());
    out.mask[r] = true;
  }
  return out;
}

namespace {

std::vector<std::vector<double>> StripRows(const Matrix& rows,
                                           const std::vector<bool>& mask) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    if (!mask[r]) continue;
    auto row = rows.row(r);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> strip_padding(const PaddedRows& padded) {
  return StripRows(padded.rows, padded.mask);
}

std::vector<std::vector<double>> strip_padding(const TokenMatrix& m) {
  return StripRows(m.rows(), m.mask());
}

}  // namespace ofar
