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

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ofar/ofar.h"

namespace ofar::cli {

namespace {

namespace fs = std::filesystem;

struct SynthOptions {
  SynthSpec spec;
  std::string out_dir = ".";
};

struct TrainOptions {
  std::string pairs;
  std::string out_dir = ".";
  std::string stats;
  std::size_t dim = 64;
  std::size_t pad_len = 256;
  std::uint32_t hidden = 64;
  std::uint32_t vocab_size = 65536;
  std::uint32_t visual_dim = 0;
  std::string loss_mode = "standard";
  std::string score_mode = "maxsim";
  TrainConfig train;
};

struct IndexOptions {
  std::string corpus;
  std::string doc_ckpt;
  std::string out = "index.bin";
  std::size_t pad_len = 256;
};

struct SearchOptions {
  std::string index;
  std::string query_ckpt;
  std::string text;
  std::string visual_file;
  std::size_t k = 10;
  bool exact = false;
  std::size_t probe = 0;
  std::string mode = "All";
};

struct EvalOptions {
  std::string docs;
  std::string queries;
  std::string qrels;
  std::string query_ckpt;
  std::string doc_ckpt;
  std::string index;
  std::string variant = "full";
  std::string modality = "All";
  std::string records;
  std::size_t pad_len = 256;
  std::size_t probe = 0;
  std::uint64_t fixed_seed = 1;
  EncoderShape fixed_shape;
};

struct ServeOptions {
  std::string index;
  std::string query_ckpt;
  std::string docs;
  std::string host = "127.0.0.1";
  int port = 8080;
};

std::vector<std::vector<double>> LoadVisualFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kParseError, path + ": expected an array of vectors");
  std::vector<std::vector<double>> vecs;
  for (const auto& v : j) {
    if (!v.is_array()) throw Error(ErrorCode::kParseError, path + ": expected arrays");
    std::vector<double> row;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(ErrorCode::kParseError, path + ": non-numeric entry");
      row.push_back(x.get<double>());
    }
    vecs.push_back(std::move(row));
  }
  return vecs;
}

std::uint32_t InferVisualDim(const std::vector<TrainPair>& pairs) {
  for (const auto& p : pairs) {
    for (const CorpusItem* item : {&p.query, &p.document}) {
      if (item->has_visual()) return static_cast<std::uint32_t>(item->visual_vecs->front().size());
    }
  }
  return 16;
}

int DoSynth(const SynthOptions& o, std::ostream& out) {
  SynthCorpus corpus = generate_synthetic(o.spec);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_corpus(dir / "documents.jsonl", corpus.documents);
  write_corpus(dir / "queries.jsonl", corpus.queries);
  write_qrels(dir / "qrels.tsv", corpus.qrels);
  write_pairs(dir / "train_pairs.jsonl", corpus.train_pairs);
  out << "wrote " << corpus.documents.size() << " documents, " << corpus.queries.size()
      << " queries, " << corpus.train_pairs.size() << " training pairs to " << dir.string()
      << '\n';
  return kExitOk;
}

int DoTrain(TrainOptions o, std::ostream& out) {
  const auto pairs = load_pairs(o.pairs);
  if (o.loss_mode == "verbatim") {
    o.train.loss_mode = LossMode::kVerbatim;
  } else if (o.loss_mode != "standard") {
    throw Error(ErrorCode::kInvalidArgument, "unknown loss mode " + o.loss_mode);
  }
  if (o.score_mode == "single") {
    o.train.score_mode = ScoreMode::kSingle;
  } else if (o.score_mode != "maxsim") {
    throw Error(ErrorCode::kInvalidArgument, "unknown score mode " + o.score_mode);
  }
  EncoderShape shape{o.vocab_size, o.hidden, static_cast<std::uint32_t>(o.dim),
                     o.visual_dim != 0 ? o.visual_dim : InferVisualDim(pairs)};
  CoreConfig core{o.dim, o.pad_len, o.train.seed};
  core.Validate();
  ContrastiveTrainer trainer(EncoderParams::Random(shape, EncoderRole::kQuery, o.train.seed),
                             EncoderParams::Random(shape, EncoderRole::kDocument, o.train.seed + 1),
                             core, o.train);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const fs::path stats_path = o.stats.empty() ? dir / "stats.jsonl" : fs::path(o.stats);
  std::ofstream stats(stats_path, std::ios::trunc);
  if (!stats) throw Error(ErrorCode::kIo, "cannot open " + stats_path.string());
  for (std::size_t e = 0; e < o.train.epochs; ++e) {
    EpochStats es = trainer.RunEpoch(pairs);
    stats << FormatStatsRecords(es);
    out << "epoch " << es.epoch << " mean_loss " << es.mean_loss << '\n';
  }
  save_checkpoint(trainer.query_encoder(), dir / "query_encoder.bin");
  save_checkpoint(trainer.doc_encoder(), dir / "doc_encoder.bin");
  out << "wrote " << (dir / "query_encoder.bin").string() << " and "
      << (dir / "doc_encoder.bin").string() << '\n';
  return kExitOk;
}

int DoIndex(const IndexOptions& o, std::ostream& out) {
  const auto docs = load_corpus(o.corpus);
  const EncoderParams enc = load_checkpoint(o.doc_ckpt, EncoderRole::kDocument);
  CoreConfig core{enc.shape.dim, o.pad_len, 0};
  core.Validate();
  std::vector<EncodedItem> encoded;
  encoded.reserve(docs.size());
  for (const auto& d : docs) encoded.push_back(encode(d, enc, core));
  RetrievalIndex index = RetrievalIndex::Build(encoded);
  index.Save(o.out);
  out << "indexed " << index.size() << " documents (" << index.token_pool_size()
      << " tokens) into " << o.out << '\n';
  return kExitOk;
}

std::string FormatHits(const RankedHits& hits) {
  std::ostringstream os;
  os << "rank\tdoc_id\tscore\n";
  char buf[64];
  for (std::size_t i = 0; i < hits.entries.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", hits.entries[i].score);
    os << (i + 1) << '\t' << hits.entries[i].doc_id << '\t' << buf << '\n';
  }
  return os.str();
}

int DoSearch(const SearchOptions& o, std::ostream& out) {
  const RetrievalIndex index = RetrievalIndex::Load(o.index);
  const EncoderParams enc = load_checkpoint(o.query_ckpt, EncoderRole::kQuery);
  SearchRequest req;
  if (!o.text.empty()) req.text = o.text;
  if (!o.visual_file.empty()) req.visual_vecs = LoadVisualFile(o.visual_file);
  req.k = o.k;
  req.mode = ParseModality(o.mode);
  req.exact = o.probe == 0;
  if (o.probe != 0) req.probe = o.probe;
  out << FormatHits(run_search(index, enc, req));
  return kExitOk;
}

int DoEval(EvalOptions o, std::ostream& out) {
  const Variant variant = ParseVariant(o.variant);
  const ModalityMode mode = ParseModality(o.modality);
  const Qrels qrels = load_qrels(o.qrels);
  const auto queries = load_corpus(o.queries);
  std::vector<CorpusItem> docs;
  if (!o.docs.empty()) docs = load_corpus(o.docs);
  std::optional<EncoderParams> q_enc, d_enc;
  if (!o.query_ckpt.empty()) q_enc = load_checkpoint(o.query_ckpt, EncoderRole::kQuery);
  if (!o.doc_ckpt.empty()) d_enc = load_checkpoint(o.doc_ckpt, EncoderRole::kDocument);
  std::optional<RetrievalIndex> index;
  if (!o.index.empty()) index = RetrievalIndex::Load(o.index);

  EvalInputs in;
  in.documents = docs;
  in.queries = queries;
  in.qrels = &qrels;
  in.query_encoder = q_enc ? &*q_enc : nullptr;
  in.doc_encoder = d_enc ? &*d_enc : nullptr;
  in.fixed_shape = o.fixed_shape;
  in.fixed_seed = o.fixed_seed;
  const std::size_t dim = q_enc ? q_enc->shape.dim : o.fixed_shape.dim;
  in.core = CoreConfig{dim, index ? index->pad_len() : o.pad_len, 0};
  in.index = index ? &*index : nullptr;
  if (o.probe != 0) in.probe = o.probe;
  const bool can_use_index = in.index != nullptr && mode == ModalityMode::kAll &&
                             variant != Variant::kFixEncoder;
  if (docs.empty() && !can_use_index) {
    throw Error(ErrorCode::kMissingArtifacts,
                "--docs is required unless a prebuilt --index serves this variant/modality");
  }

  MetricsReport report = run_eval(in, variant, mode);
  out << FormatReportTable(std::span<const MetricsReport>(&report, 1));
  const std::string records = FormatReportRecords(report);
  if (!o.records.empty()) {
    std::ofstream rec(o.records, std::ios::trunc);
    if (!rec) throw Error(ErrorCode::kIo, "cannot open " + o.records);
    rec << records;
  } else {
    out << records;
  }
  return kExitOk;
}

int DoServe(ServeOptions o, std::ostream& out) {
  if (const char* env = std::getenv("OFAR_PORT"); env != nullptr && *env != '\0') {
    try {
      o.port = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, std::string("bad OFAR_PORT '") + env + "'");
    }
  }
  SearchService service(RetrievalIndex::Load(o.index),
                        load_checkpoint(o.query_ckpt, EncoderRole::kQuery),
                        o.docs.empty() ? std::vector<CorpusItem>{} : load_corpus(o.docs));
  HttpServer server(service);
  out << "serving " << service.index().size() << " documents on http://" << o.host << ':'
      << o.port << '\n'
      << std::flush;
  if (!server.Listen(o.host, o.port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-level search over text and visual embeddings"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");
  synth_cmd->add_option("--topics", synth.spec.n_topics);
  synth_cmd->add_option("--docs", synth.spec.n_docs);
  synth_cmd->add_option("--queries", synth.spec.n_queries);
  synth_cmd->add_option("--train-queries", synth.spec.n_train_queries);
  synth_cmd->add_option("--tokens", synth.spec.tokens_per_item, "Words per document");
  synth_cmd->add_option("--query-tokens", synth.spec.query_tokens, "Words per query");
  synth_cmd->add_option("--vocab", synth.spec.vocab);
  synth_cmd->add_option("--noise", synth.spec.noise_rate);
  synth_cmd->add_option("--seed", synth.spec.seed);
  synth_cmd->add_option("--visual-dim", synth.spec.visual_dim, "0 disables visual vectors");
  synth_cmd->add_option("--visual-per-item", synth.spec.visual_per_item);
  synth_cmd->add_option("--visual-spread", synth.spec.visual_spread);
  synth_cmd->add_option("--visual-noise", synth.spec.visual_noise);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train query/document encoders");
  train_cmd->add_option("--pairs", train.pairs, "Training pairs JSONL")->required();
  train_cmd->add_option("--out-dir", train.out_dir);
  train_cmd->add_option("--stats", train.stats, "Per-batch stats JSONL (default out-dir/stats.jsonl)");
  train_cmd->add_option("--dim", train.dim);
  train_cmd->add_option("--pad-len", train.pad_len);
  train_cmd->add_option("--hidden", train.hidden);
  train_cmd->add_option("--vocab-size", train.vocab_size);
  train_cmd->add_option("--visual-dim", train.visual_dim, "0 infers from the data");
  train_cmd->add_option("--batch", train.train.batch_size);
  train_cmd->add_option("--tau", train.train.tau);
  train_cmd->add_option("--lr", train.train.lr);
  train_cmd->add_option("--epochs", train.train.epochs);
  train_cmd->add_option("--loss-mode", train.loss_mode)->check(CLI::IsMember({"standard", "verbatim"}));
  train_cmd->add_option("--score-mode", train.score_mode)->check(CLI::IsMember({"maxsim", "single"}));
  train_cmd->add_option("--seed", train.train.seed);
  train_cmd->add_flag("--tie-weights", train.train.tie_weights);

  IndexOptions index;
  auto* index_cmd = app.add_subcommand("index", "Encode a corpus into an index file");
  index_cmd->add_option("--corpus", index.corpus)->required();
  index_cmd->add_option("--doc-ckpt", index.doc_ckpt)->required();
  index_cmd->add_option("--out", index.out);
  index_cmd->add_option("--pad-len", index.pad_len);

  SearchOptions search;
  auto* search_cmd = app.add_subcommand("search", "Search an index");
  search_cmd->add_option("--index", search.index)->required();
  search_cmd->add_option("--query-ckpt", search.query_ckpt)->required();
  search_cmd->add_option("--text", search.text);
  search_cmd->add_option("--visual-file", search.visual_file, "JSON array of visual vectors");
  search_cmd->add_option("--k,-k", search.k)->check(CLI::PositiveNumber);
  auto* exact_flag = search_cmd->add_flag("--exact", search.exact, "Exhaustive MaxSim (default)");
  search_cmd->add_option("--probe", search.probe, "Approximate search probe")
      ->check(CLI::PositiveNumber)
      ->excludes(exact_flag);
  search_cmd->add_option("--mode", search.mode)->check(CLI::IsMember({"All", "Vision", "Text"}));

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compute MRR@10 / R@10 / R@50");
  eval_cmd->add_option("--docs", ev.docs, "Document corpus JSONL");
  eval_cmd->add_option("--index", ev.index, "Prebuilt index (full/no_maxsim, All modality)");
  eval_cmd->add_option("--queries", ev.queries)->required();
  eval_cmd->add_option("--qrels", ev.qrels)->required();
  eval_cmd->add_option("--query-ckpt", ev.query_ckpt);
  eval_cmd->add_option("--doc-ckpt", ev.doc_ckpt);
  eval_cmd->add_option("--variant", ev.variant)
      ->check(CLI::IsMember({"full", "no_maxsim", "fix_encoder"}));
  eval_cmd->add_option("--modality", ev.modality)->check(CLI::IsMember({"All", "Vision", "Text"}));
  eval_cmd->add_option("--records", ev.records, "Write key=value records here");
  eval_cmd->add_option("--pad-len", ev.pad_len);
  eval_cmd->add_option("--probe", ev.probe);
  eval_cmd->add_option("--fixed-seed", ev.fixed_seed, "Seed of the untrained encoders");
  eval_cmd->add_option("--dim", ev.fixed_shape.dim, "Untrained encoder dim");
  eval_cmd->add_option("--hidden", ev.fixed_shape.hidden);
  eval_cmd->add_option("--vocab-size", ev.fixed_shape.vocab_size);
  eval_cmd->add_option("--visual-dim", ev.fixed_shape.visual_dim);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP search API");
  serve_cmd->add_option("--index", serve.index)->required();
  serve_cmd->add_option("--query-ckpt", serve.query_ckpt)->required();
  serve_cmd->add_option("--docs", serve.docs, "Document corpus for snippets and /api/doc");
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--port", serve.port, "Overridden by OFAR_PORT");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return DoSynth(synth, out);
    if (train_cmd->parsed()) return DoTrain(train, out);
    if (index_cmd->parsed()) return DoIndex(index, out);
    if (search_cmd->parsed()) {
      if (search.text.empty() && search.visual_file.empty()) {
        err << "search: one of --text or --visual-file is required\n";
        return kExitUsage;
      }
      return DoSearch(search, out);
    }
    if (eval_cmd->parsed()) return DoEval(ev, out);
    if (serve_cmd->parsed()) return DoServe(serve, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ofar::cli
