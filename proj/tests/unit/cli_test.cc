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
#include <sstream>

#include "cli.h"
#include "ofar/ofar.h"
#include "test_support.h"

namespace ofar {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Call(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "ofar");
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t Lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

class CliTest : public ::testing::Test {
 protected:
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  // synth -> train -> index over a tiny corpus.
  void Pipeline(std::size_t n_docs) {
    ASSERT_EQ(Call({"synth", "--out-dir", P("data"), "--topics", "3", "--docs",
                    std::to_string(n_docs), "--queries", "6", "--train-queries", "16", "--vocab",
                    "90", "--tokens", "6", "--query-tokens", "3", "--visual-dim", "2"})
                  .code,
              0);
    Result train = Call({"train", "--pairs", P("data/train_pairs.jsonl"), "--out-dir", P("ckpt"),
                         "--dim", "8", "--hidden", "8", "--pad-len", "16", "--vocab-size",
                         "1024", "--batch", "4", "--lr", "0.01"});
    ASSERT_EQ(train.code, 0) << train.err;
    Result index = Call({"index", "--corpus", P("data/documents.jsonl"), "--doc-ckpt",
                         P("ckpt/doc_encoder.bin"), "--out", P("idx.bin"), "--pad-len", "16"});
    ASSERT_EQ(index.code, 0) << index.err;
  }

  testing::TempDir dir_;
};

TEST_F(CliTest, SynthWritesCorpusFiles) {
  Pipeline(3);
  for (const char* f : {"documents.jsonl", "queries.jsonl", "qrels.tsv", "train_pairs.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir_ / "data" / f)) << f;
  }
  EXPECT_EQ(load_corpus(dir_ / "data/documents.jsonl").size(), 3u);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "ckpt/query_encoder.bin"));
  EXPECT_EQ(Lines(std::ifstream(dir_ / "ckpt/stats.jsonl").good() ? [&] {
              std::ifstream in(dir_ / "ckpt/stats.jsonl");
              return std::string((std::istreambuf_iterator<char>(in)), {});
            }() : std::string()),
            4u);
}

TEST_F(CliTest, SearchClampsKToCorpusSize) {
  Pipeline(3);
  Result r = Call({"search", "--index", P("idx.bin"), "--query-ckpt", P("ckpt/query_encoder.bin"),
                   "--text", "w00001 w00002", "-k", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  // Header plus three rows.
  EXPECT_EQ(Lines(r.out), 4u);
  EXPECT_EQ(r.out.rfind("rank\tdoc_id\tscore", 0), 0u);
  Result approx = Call({"search", "--index", P("idx.bin"), "--query-ckpt",
                        P("ckpt/query_encoder.bin"), "--text", "w00001", "--probe", "2"});
  EXPECT_EQ(approx.code, 0) << approx.err;
}

TEST_F(CliTest, SearchWithVisualFile) {
  Pipeline(3);
  std::ofstream(dir_ / "v.json") << "[[0.5, -1.0]]";
  Result r = Call({"search", "--index", P("idx.bin"), "--query-ckpt", P("ckpt/query_encoder.bin"),
                   "--visual-file", P("v.json"), "--mode", "Vision"});
  EXPECT_EQ(r.code, 0) << r.err;
  Result empty = Call({"search", "--index", P("idx.bin"), "--query-ckpt",
                       P("ckpt/query_encoder.bin"), "--visual-file", P("v.json"), "--mode", "Text"});
  EXPECT_EQ(empty.code, 2);
}

TEST_F(CliTest, EvalReportsAllVariants) {
  Pipeline(12);
  for (const char* variant : {"full", "no_maxsim", "fix_encoder"}) {
    Result r = Call({"eval", "--docs", P("data/documents.jsonl"), "--queries",
                     P("data/queries.jsonl"), "--qrels", P("data/qrels.tsv"), "--query-ckpt",
                     P("ckpt/query_encoder.bin"), "--doc-ckpt", P("ckpt/doc_encoder.bin"),
                     "--pad-len", "16", "--variant", variant, "--records", P("rec.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(variant), std::string::npos);
    std::ifstream in(dir_ / "rec.txt");
    std::string rec((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(rec.find("mrr_at_10="), std::string::npos);
  }
  Result idx = Call({"eval", "--index", P("idx.bin"), "--queries", P("data/queries.jsonl"),
                     "--qrels", P("data/qrels.tsv"), "--query-ckpt", P("ckpt/query_encoder.bin")});
  EXPECT_EQ(idx.code, 0) << idx.err;
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Call({"search", "--bogus-flag"}).code, 1);
  EXPECT_EQ(Call({"nonsense"}).code, 1);
  EXPECT_EQ(Call({}).code, 1);
  EXPECT_EQ(Call({"search", "--index", "x", "--query-ckpt", "y", "--exact", "--probe", "3"}).code,
            1);
  EXPECT_EQ(Call({"eval", "--queries", "q", "--qrels", "r", "--variant", "half"}).code, 1);
  EXPECT_EQ(Call({"--help"}).code, 0);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  Pipeline(3);
  Result r = Call({"eval", "--docs", P("data/documents.jsonl"), "--queries",
                   P("data/queries.jsonl"), "--qrels", P("missing.tsv"), "--query-ckpt",
                   P("ckpt/query_encoder.bin"), "--doc-ckpt", P("ckpt/doc_encoder.bin"),
                   "--pad-len", "16"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  std::ofstream(dir_ / "bad.jsonl") << "{\"id\":\"a\"\n";
  EXPECT_EQ(Call({"index", "--corpus", P("bad.jsonl"), "--doc-ckpt", P("ckpt/doc_encoder.bin"),
                  "--out", P("x.bin")})
                .code,
            2);
  EXPECT_EQ(Call({"search", "--index", P("ckpt/doc_encoder.bin"), "--query-ckpt",
                  P("ckpt/query_encoder.bin"), "--text", "a"})
                .code,
            2);
}

}  // namespace
}  // namespace ofar
