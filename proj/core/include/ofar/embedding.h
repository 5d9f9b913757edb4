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
#include <vector>

#include "ofar/token_matrix.h"

namespace ofar {

struct CoreConfig {
  std::size_t dim = 64;
  std::size_t pad_len = 256;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument when dim < 2 or pad_len < 1.
  void Validate() const;
};

inline constexpr double kZeroRowEpsilon = 1e-12;

// A raw pad_len x D sequence with its validity mask, before normalization.
struct PaddedRows {
  Matrix rows;
  std::vector<bool> mask;
};

// Divides every masked-true row by its Euclidean norm and zeroes every
// masked-false row. Throws kZeroRow when a masked-true row has norm <= 1e-12,
// kEmptyMask when no mask entry is true and kDimMismatch when the mask length
// differs from the row count.
TokenMatrix l2_normalize_rows(const Matrix& raw, const std::vector<bool>& mask);
inline TokenMatrix l2_normalize_rows(const PaddedRows& padded) {
  return l2_normalize_rows(padded.rows, padded.mask);
}

// Copies the tokens into the first rows of a pad_len x D matrix, zero-fills
// the rest and marks exactly the copied rows valid. Throws kEmpty for no
// tokens, kTooLong when tokens exceed pad_len and kDimMismatch for ragged
// input.
PaddedRows pad_and_mask(std::span<const std::vector<double>> tokens,
                        std::size_t pad_len);

// Masked-true rows in order.
std::vector<std::vector<double>> strip_padding(const PaddedRows& padded);
std::vector<std::vector<double>> strip_padding(const TokenMatrix& m);

}  // namespace ofar
