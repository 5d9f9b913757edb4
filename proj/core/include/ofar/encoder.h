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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ofar/corpus_item.h"
#include "ofar/embedding.h"
#include "ofar/token_matrix.h"

namespace ofar {

// Lowercases ASCII, splits on anything that is not an ASCII letter/digit or
// a non-ASCII byte, and maps each word to FNV-1a-64(word) mod vocab_size.
// Stable across runs and platforms.
std::vector<std::uint32_t> tokenize(std::string_view text, std::uint32_t vocab_size);

// The words tokenize() would hash, in order.
std::vector<std::string> split_words(std::string_view text);

enum class EncoderRole : std::uint8_t { kQuery = 0, kDocument = 1 };

struct EncoderShape {
  std::uint32_t vocab_size = 65536;
  std::uint32_t hidden = 64;
  std::uint32_t dim = 64;
  std::uint32_t visual_dim = 16;

  bool operator==(const EncoderShape&) const = default;
};

// Trainable stand-in encoder: hashed-token embedding table, a linear
// projection to the output dimension and a separate projection for
// precomputed visual vectors.
struct EncoderParams {
  EncoderShape shape;
  EncoderRole role = EncoderRole::kQuery;
  Matrix embed_table;        // vocab_size x hidden
  Matrix projection;         // hidden x dim
  Matrix visual_projection;  // visual_dim x dim

  // Zero-valued parameters of the given shape (also used as a gradient
  // accumulator).
  static EncoderParams Zeros(const EncoderShape& shape, EncoderRole role);

  // Gaussian init: embeddings N(0, 1), projections N(0, 1/fan_in).
  static EncoderParams Random(const EncoderShape& shape, EncoderRole role,
                              std::uint64_t seed);

  // Throws kInvalidArgument on shape inconsistency, kNonFinite on NaN/Inf.
  void Validate() const;

  // Visits every parameter tensor in a fixed order.
  template <typename F>
  void ForEachTensor(F&& f) {
    f(embed_table);
    f(projection);
    f(visual_projection);
  }
  template <typename F>
  void ForEachTensor(F&& f) const {
    f(embed_table);
    f(projection);
    f(visual_projection);
  }

  bool operator==(const EncoderParams&) const = default;
};

enum class Modality { kText, kVisual };

struct ModalitySpan {
  Modality modality;
  std::size_t begin;  // first row
  std::size_t end;    // one past the last row

  bool operator==(const ModalitySpan&) const = default;
};

struct EncodedItem {
  TokenMatrix matrix;
  std::string source_id;
  std::vector<ModalitySpan> modality_spans;
};

// Inputs and pre-normalization activations of one encode() call, kept for
// the backward pass.
struct EncodeTrace {
  std::vector<std::uint32_t> token_ids;
  std::vector<std::vector<double>> visual_inputs;
  PaddedRows raw;
};

// Text rows precede visual rows. Throws kEmptyItem when the item has neither
// text tokens nor visual vectors, kTooLong when the sequence exceeds pad_len
// and kDimMismatch when dimensions disagree with the parameters.
EncodedItem encode(const CorpusItem& item, const EncoderParams& params,
                   const CoreConfig& cfg);
EncodedItem encode(const CorpusItem& item, const EncoderParams& params,
                   const CoreConfig& cfg, EncodeTrace* trace);

// Accumulates dLoss/dParams into grads given dLoss/dRows of the normalized
// output (pad_len x dim; padding rows are ignored).
void backprop_encoder(const EncodeTrace& trace, const EncodedItem& encoded,
                      const Matrix& grad_rows, const EncoderParams& params,
                      EncoderParams& grads);

// Checkpoint file: "OFAREnc1", u32 version, u32 vocab_size, u32 hidden,
// u32 dim, u32 visual_dim, then embed_table, projection and
// visual_projection as row-major little-endian f32.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const EncoderParams& params, const std::filesystem::path& path);
EncoderParams load_checkpoint(const std::filesystem::path& path,
                              EncoderRole role = EncoderRole::kQuery);

}  // namespace ofar
