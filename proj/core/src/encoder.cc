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

#include "ofar/encoder.h"

#include <cctype>
#include <cmath>
#include <random>

#include "binary_io.h"
#include "ofar/error.h"

namespace ofar {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;
constexpr std::string_view kCheckpointMagic = "OFAREnc1";

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::uint64_t Fnv1a(std::string_view word) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : word) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

void CheckShape(const Matrix& m, std::size_t rows, std::size_t cols,
                const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " has shape " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()));
  }
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (IsWordByte(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::vector<std::uint32_t> tokenize(std::string_view text, std::uint32_t vocab_size) {
  if (vocab_size == 0) throw Error(ErrorCode::kInvalidArgument, "vocab_size is 0");
  std::vector<std::uint32_t> ids;
  for (const auto& w : split_words(text)) {
    ids.push_back(static_cast<std::uint32_t>(Fnv1a(w) % vocab_size));
  }
  return ids;
}

EncoderParams EncoderParams::Zeros(const EncoderShape& shape, EncoderRole role) {
  EncoderParams p;
  p.shape = shape;
  p.role = role;
  p.embed_table = Matrix(shape.vocab_size, shape.hidden);
  p.projection = Matrix(shape.hidden, shape.dim);
  p.visual_projection = Matrix(shape.visual_dim, shape.dim);
  return p;
}

EncoderParams EncoderParams::Random(const EncoderShape& shape, EncoderRole role,
                                    std::uint64_t seed) {
  EncoderParams p = Zeros(shape, role);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : p.embed_table.data()) v = unit(rng);
  const double proj_scale = 1.0 / std::sqrt(static_cast<double>(std::max(1u, shape.hidden)));
  for (double& v : p.projection.data()) v = unit(rng) * proj_scale;
  const double vis_scale = 1.0 / std::sqrt(static_cast<double>(std::max(1u, shape.visual_dim)));
  for (double& v : p.visual_projection.data()) v = unit(rng) * vis_scale;
  return p;
}

void EncoderParams::Validate() const {
  if (shape.vocab_size == 0 || shape.hidden == 0 || shape.dim < 2) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate encoder shape");
  }
  CheckShape(embed_table, shape.vocab_size, shape.hidden, "embed_table");
  CheckShape(projection, shape.hidden, shape.dim, "projection");
  CheckShape(visual_projection, shape.visual_dim, shape.dim, "visual_projection");
  ForEachTensor([](const Matrix& m) {
    for (double v : m.data()) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite parameter");
    }
  });
}

EncodedItem encode(const CorpusItem& item, const EncoderParams& params,
                   const CoreConfig& cfg) {
  return encode(item, params, cfg, nullptr);
}

EncodedItem encode(const CorpusItem& item, const EncoderParams& params,
                   const CoreConfig& cfg, EncodeTrace* trace) {
  const auto& shape = params.shape;
  if (shape.dim != cfg.dim) {
    throw Error(ErrorCode::kDimMismatch, "encoder dim " + std::to_string(shape.dim) +
                                             " != config dim " + std::to_string(cfg.dim));
  }
  std::vector<std::uint32_t> ids;
  if (item.text) ids = tokenize(*item.text, shape.vocab_size);
  const std::size_t n_visual = item.has_visual() ? item.visual_vecs->size() : 0;
  if (ids.empty() && n_visual == 0) {
    throw Error(ErrorCode::kEmptyItem, "item '" + item.id + "' has no text tokens or visual vectors");
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(ids.size() + n_visual);
  for (std::uint32_t id : ids) {
    auto e = params.embed_table.row(id);
    std::vector<double> out(shape.dim, 0.0);
    for (std::size_t h = 0; h < shape.hidden; ++h) {
      const double eh = e[h];
      auto p = params.projection.row(h);
      for (std::size_t c = 0; c < shape.dim; ++c) out[c] += eh * p[c];
    }
    rows.push_back(std::move(out));
  }
  for (std::size_t v = 0; v < n_visual; ++v) {
    const auto& vec = (*item.visual_vecs)[v];
    if (vec.size() != shape.visual_dim) {
      throw Error(ErrorCode::kDimMismatch,
                  "item '" + item.id + "' visual vector has length " +
                      std::to_string(vec.size()) + ", encoder expects " +
                      std::to_string(shape.visual_dim));
    }
    std::vector<double> out(shape.dim, 0.0);
    for (std::size_t k = 0; k < vec.size(); ++k) {
      auto p = params.visual_projection.row(k);
      for (std::size_t c = 0; c < shape.dim; ++c) out[c] += vec[k] * p[c];
    }
    rows.push_back(std::move(out));
  }

  PaddedRows padded = pad_and_mask(rows, cfg.pad_len);
  EncodedItem result{l2_normalize_rows(padded), item.id, {}};
  if (!ids.empty()) result.modality_spans.push_back({Modality::kText, 0, ids.size()});
  if (n_visual > 0) {
    result.modality_spans.push_back({Modality::kVisual, ids.size(), ids.size() + n_visual});
  }
  if (trace != nullptr) {
    trace->token_ids = std::move(ids);
    trace->visual_inputs.clear();
    if (n_visual > 0) trace->visual_inputs = *item.visual_vecs;
    trace->raw = std::move(padded);
  }
  return result;
}

void backprop_encoder(const EncodeTrace& trace, const EncodedItem& encoded,
                      const Matrix& grad_rows, const EncoderParams& params,
                      EncoderParams& grads) {
  const auto& shape = params.shape;
  const std::size_t dim = shape.dim;
  const std::size_t n_text = trace.token_ids.size();
  std::vector<double> d_raw(dim);
  const std::size_t n_rows = n_text + trace.visual_inputs.size();
  for (std::size_t r = 0; r < n_rows; ++r) {
    // d(x/|x|)/dx applied to g: (g - u (u.g)) / |x|
    auto g = grad_rows.row(r);
    auto u = encoded.matrix.row(r);
    auto x = trace.raw.rows.row(r);
    double ug = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      ug += u[c] * g[c];
      sq += x[c] * x[c];
    }
    const double inv_norm = 1.0 / std::sqrt(sq);
    bool any = false;
    for (std::size_t c = 0; c < dim; ++c) {
      d_raw[c] = (g[c] - u[c] * ug) * inv_norm;
      any = any || d_raw[c] != 0.0;
    }
    if (!any) continue;

    if (r < n_text) {
      const std::uint32_t id = trace.token_ids[r];
      auto e = params.embed_table.row(id);
      auto de = grads.embed_table.row(id);
      for (std::size_t h = 0; h < shape.hidden; ++h) {
        auto p = params.projection.row(h);
        auto dp = grads.projection.row(h);
        double acc = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          acc += p[c] * d_raw[c];
          dp[c] += e[h] * d_raw[c];
        }
        de[h] += acc;
      }
    } else {
      const auto& vec = trace.visual_inputs[r - n_text];
      for (std::size_t k = 0; k < vec.size(); ++k) {
        auto dv = grads.visual_projection.row(k);
        for (std::size_t c = 0; c < dim; ++c) dv[c] += vec[k] * d_raw[c];
      }
    }
  }
}

void save_checkpoint(const EncoderParams& params, const std::filesystem::path& path) {
  params.Validate();
  internal::ByteWriter w;
  w.Bytes(kCheckpointMagic);
  w.U32(kCheckpointVersion);
  w.U32(params.shape.vocab_size);
  w.U32(params.shape.hidden);
  w.U32(params.shape.dim);
  w.U32(params.shape.visual_dim);
  params.ForEachTensor([&](const Matrix& m) {
    for (double v : m.data()) w.F32(static_cast<float>(v));
  });
  w.WriteFile(path);
}

EncoderParams load_checkpoint(const std::filesystem::path& path, EncoderRole role) {
  auto r = internal::ByteReader::FromFile(path);
  if (r.remaining() < kCheckpointMagic.size() || r.Bytes(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error(ErrorCode::kBadMagic, path.string() + " is not an encoder checkpoint");
  }
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionMismatch, "checkpoint version " + std::to_string(version));
  }
  EncoderShape shape;
  shape.vocab_size = r.U32();
  shape.hidden = r.U32();
  shape.dim = r.U32();
  shape.visual_dim = r.U32();
  const std::uint64_t expected =
      4ull * (static_cast<std::uint64_t>(shape.vocab_size) * shape.hidden +
              static_cast<std::uint64_t>(shape.hidden) * shape.dim +
              static_cast<std::uint64_t>(shape.visual_dim) * shape.dim);
  if (r.remaining() != expected) {
    throw Error(ErrorCode::kCorruptLength,
                "checkpoint payload is " + std::to_string(r.remaining()) +
                    " bytes, header implies " + std::to_string(expected));
  }
  EncoderParams p = EncoderParams::Zeros(shape, role);
  p.ForEachTensor([&](Matrix& m) {
    for (double& v : m.data()) v = r.F32();
  });
  p.Validate();
  return p;
}

}  // namespace ofar
