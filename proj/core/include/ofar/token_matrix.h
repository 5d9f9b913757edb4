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

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace ofar {

// Dense row-major matrix of doubles. Used for raw (pre-normalization)
// activations, parameters and score matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Token-level embedding of one query or document: pad_len rows of dimension
// dim, with a validity mask. Real rows are unit-norm, padding rows are zero.
// Instances are only produced by l2_normalize_rows / pad_and_mask and are
// immutable afterwards.
class TokenMatrix {
 public:
  TokenMatrix() = default;

  std::size_t pad_len() const { return rows_.rows(); }
  std::size_t dim() const { return rows_.cols(); }

  const Matrix& rows() const { return rows_; }
  std::span<const double> row(std::size_t r) const { return rows_.row(r); }
  const std::vector<bool>& mask() const { return mask_; }
  bool valid(std::size_t r) const { return mask_[r]; }

  // Number of masked-true rows.
  std::size_t num_tokens() const { return num_tokens_; }

  // Indices of masked-true rows, ascending.
  std::vector<std::size_t> token_indices() const;

  bool operator==(const TokenMatrix&) const = default;

  // Adopts rows that are already unit-norm (within 1e-6) on the mask and
  // zero elsewhere, without renormalizing. Used when reloading stored
  // embeddings so values stay bit-identical. Throws kInvalidArgument when
  // the rows violate the invariants.
  static TokenMatrix FromUnitRows(Matrix rows, std::vector<bool> mask);

 private:
  friend TokenMatrix l2_normalize_rows(const Matrix&, const std::vector<bool>&);

  Matrix rows_;
  std::vector<bool> mask_;
  std::size_t num_tokens_ = 0;
};

}  // namespace ofar
