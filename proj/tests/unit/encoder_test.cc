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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "ofar/encoder.h"
#include "ofar/error.h"
#include "ofar/eval.h"
#include "test_support.h"

namespace ofar {
namespace {

constexpr EncoderShape kSmall{1024, 8, 6, 3};

CorpusItem Item(std::optional<std::string> text,
                std::optional<std::vector<std::vector<double>>> visual = std::nullopt) {
  CorpusItem item;
  item.id = "x";
  item.text = std::move(text);
  item.visual_vecs = std::move(visual);
  return item;
}

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize("", 65536).empty()); }

TEST(Tokenize, DeterministicAndStable) {
  const auto a = tokenize("sell turtle", 65536);
  EXPECT_EQ(a, tokenize("sell turtle", 65536));
  // FNV-1a-64 mod 65536, computed independently.
  EXPECT_EQ(a, (std::vector<std::uint32_t>{34949, 33023}));
  EXPECT_EQ(tokenize("endangered", 65536), std::vector<std::uint32_t>{128});
}

TEST(Tokenize, CaseFoldingAndPunctuation) {
  EXPECT_EQ(tokenize("Turtle", 65536), tokenize("turtle", 65536));
  EXPECT_EQ(tokenize("  TURTLE!!, sell?", 65536), tokenize("turtle sell", 65536));
  EXPECT_EQ(split_words("Da-Hua\tturtle"), (std::vector<std::string>{"da", "hua", "turtle"}));
  // Non-ASCII bytes stay inside words.
  EXPECT_EQ(split_words("大花 turtle"), (std::vector<std::string>{"大花", "turtle"}));
}

TEST(Encode, TextOnlyHasSingleTextSpan) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 1);
  EncodedItem e = encode(Item("endangered turtle sale"), params, {6, 8, 0});
  ASSERT_EQ(e.modality_spans.size(), 1u);
  EXPECT_EQ(e.modality_spans[0], (ModalitySpan{Modality::kText, 0, 3}));
  EXPECT_EQ(e.matrix.num_tokens(), 3u);
}

TEST(Encode, TextThenVisualRows) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kDocument, 2);
  EncodedItem e = encode(Item("a b c", {{{1, 0, 0}, {0, 1, 0}}}), params, {6, 8, 0});
  EXPECT_EQ(e.matrix.num_tokens(), 5u);
  EXPECT_EQ(e.matrix.mask(), (std::vector<bool>{true, true, true, true, true, false, false, false}));
  ASSERT_EQ(e.modality_spans.size(), 2u);
  EXPECT_EQ(e.modality_spans[0], (ModalitySpan{Modality::kText, 0, 3}));
  EXPECT_EQ(e.modality_spans[1], (ModalitySpan{Modality::kVisual, 3, 5}));
  for (std::size_t r : e.matrix.token_indices()) {
    double sq = 0.0;
    for (double v : e.matrix.row(r)) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
}

TEST(Encode, Deterministic) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 3);
  auto item = Item("sell turtle now", {{{0.5, -1, 2}}});
  EXPECT_EQ(encode(item, params, {6, 8, 0}).matrix, encode(item, params, {6, 8, 0}).matrix);
}

TEST(Encode, Errors) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 3);
  auto code = [&](const CorpusItem& item, CoreConfig cfg) {
    try {
      encode(item, params, cfg);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(Item(std::nullopt), {6, 8, 0}), ErrorCode::kEmptyItem);
  EXPECT_EQ(code(Item("?!"), {6, 8, 0}), ErrorCode::kEmptyItem);
  EXPECT_EQ(code(Item("a b c d e"), {6, 4, 0}), ErrorCode::kTooLong);
  EXPECT_EQ(code(Item("a", {{{1, 2}}}), {6, 4, 0}), ErrorCode::kDimMismatch);
  EXPECT_EQ(code(Item("a"), {5, 4, 0}), ErrorCode::kDimMismatch);
}

TEST(Encode, ModalityAblationEqualsRemoval) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kDocument, 4);
  CoreConfig cfg{6, 8, 0};
  auto both = Item("evidence regulation", {{{1, 2, 3}, {3, 2, 1}}});
  auto text_only = apply_modality_filter(both, ModalityMode::kText);
  EXPECT_EQ(encode(text_only.item, params, cfg).matrix,
            encode(Item("evidence regulation"), params, cfg).matrix);
  auto vision_only = apply_modality_filter(both, ModalityMode::kVision);
  EXPECT_EQ(encode(vision_only.item, params, cfg).matrix,
            encode(Item(std::nullopt, {{{1, 2, 3}, {3, 2, 1}}}), params, cfg).matrix);
}

// Backward pass of one item against finite differences of a linear
// functional of the normalized output.
TEST(BackpropEncoder, MatchesFiniteDifferences) {
  EncoderShape shape{64, 4, 4, 3};
  auto params = EncoderParams::Random(shape, EncoderRole::kQuery, 9);
  CoreConfig cfg{4, 6, 0};
  auto item = Item("alpha beta gamma", {{{0.3, -0.2, 0.9}}});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix weights(cfg.pad_len, cfg.dim);
  for (double& w : weights.data()) w = n(rng);
  auto objective = [&](const EncoderParams& p) {
    auto e = encode(item, p, cfg);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.data().size(); ++i) {
      acc += weights.data()[i] * e.matrix.rows().data()[i];
    }
    return acc;
  };
  EncodeTrace trace;
  auto encoded = encode(item, params, cfg, &trace);
  auto grads = EncoderParams::Zeros(shape, EncoderRole::kQuery);
  backprop_encoder(trace, encoded, weights, params, grads);

  auto check = [&](Matrix EncoderParams::*member) {
    Matrix fd = testing::FiniteDifference(params.*member, [&](const Matrix& m) {
      EncoderParams p = params;
      p.*member = m;
      return objective(p);
    });
    EXPECT_LT(testing::MaxRelativeError(grads.*member, fd, 1e-6), 1e-5);
  };
  check(&EncoderParams::embed_table);
  check(&EncoderParams::projection);
  check(&EncoderParams::visual_projection);
}

TEST(Checkpoint, RoundTripIsStable) {
  testing::TempDir dir;
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 5);
  save_checkpoint(params, dir / "a.bin");
  auto loaded = load_checkpoint(dir / "a.bin");
  EXPECT_EQ(loaded.shape, params.shape);
  // Stored as f32: one rounding, then fixed.
  for (std::size_t i = 0; i < params.projection.data().size(); ++i) {
    EXPECT_EQ(loaded.projection.data()[i],
              static_cast<double>(static_cast<float>(params.projection.data()[i])));
  }
  save_checkpoint(loaded, dir / "b.bin");
  EXPECT_EQ(load_checkpoint(dir / "b.bin"), loaded);
}

TEST(Checkpoint, CorruptFilesRaiseTypedErrors) {
  testing::TempDir dir;
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 5);
  save_checkpoint(params, dir / "good.bin");
  std::ifstream in(dir / "good.bin", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto write = [&](const std::string& name, const std::string& data) {
    std::ofstream out(dir / name, std::ios::binary);
    out << data;
    return dir / name;
  };
  auto code = [](const std::filesystem::path& p) {
    try {
      load_checkpoint(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(write("trunc.bin", bytes.substr(0, bytes.size() - 3))), ErrorCode::kCorruptLength);
  EXPECT_EQ(code(write("header.bin", bytes.substr(0, 12))), ErrorCode::kCorruptLength);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code(write("magic.bin", bad_magic)), ErrorCode::kBadMagic);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_EQ(code(write("version.bin", bad_version)), ErrorCode::kVersionMismatch);
  EXPECT_EQ(code(dir / "missing.bin"), ErrorCode::kIo);
}

TEST(EncoderParams, ValidateRejectsNonFinite) {
  auto params = EncoderParams::Random(kSmall, EncoderRole::kQuery, 5);
  params.projection(0, 0) = std::nan("");
  EXPECT_THROW(params.Validate(), Error);
}

}  // namespace
}  // namespace ofar
