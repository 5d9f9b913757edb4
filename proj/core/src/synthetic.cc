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

#include "ofar/synthetic.h"

#include <cstdio>
#include <random>
#include <string>

#include "ofar/error.h"

namespace ofar {

namespace {

std::string Id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, n);
  return buf;
}

std::string Word(std::size_t n) { return Id("w", n); }

class Generator {
 public:
  explicit Generator(const SynthSpec& spec)
      : spec_(spec), rng_(spec.seed), words_per_topic_(spec.vocab / spec.n_topics) {
    std::gamma_distribution<double> gamma(spec.topic_concentration, 1.0);
    for (std::size_t t = 0; t < spec.n_topics; ++t) {
      std::vector<double> w(words_per_topic_);
      for (double& x : w) x = gamma(rng_);
      topic_words_.emplace_back(w.begin(), w.end());
    }
    if (spec.visual_dim > 0) {
      std::normal_distribution<double> unit(0.0, 1.0);
      for (std::size_t t = 0; t < spec.n_topics; ++t) {
        std::vector<double> p(spec.visual_dim);
        for (double& x : p) x = unit(rng_);
        prototypes_.push_back(std::move(p));
      }
    }
  }

  void Documents(SynthCorpus& out) {
    std::normal_distribution<double> spread(0.0, spec_.visual_spread);
    std::normal_distribution<double> jitter(0.0, 0.1);
    for (std::size_t i = 0; i < spec_.n_docs; ++i) {
      const std::size_t topic = i % spec_.n_topics;
      std::vector<std::size_t> words(spec_.tokens_per_item);
      for (auto& w : words) w = topic * words_per_topic_ + topic_words_[topic](rng_);
      doc_words_.push_back(words);
      CorpusItem doc;
      doc.id = Id("d", i);
      doc.kind = ItemKind::kDocument;
      doc.text = Join(words);
      if (spec_.visual_dim > 0) {
        std::vector<double> center = prototypes_[topic];
        for (double& x : center) x += spread(rng_);
        doc.visual_vecs = Jittered(center, jitter);
        doc_centers_.push_back(std::move(center));
      }
      out.documents.push_back(std::move(doc));
    }
  }

  std::pair<CorpusItem, std::size_t> Query(const std::string& id) {
    std::uniform_int_distribution<std::size_t> pick_doc(0, spec_.n_docs - 1);
    std::uniform_int_distribution<std::size_t> pick_token(0, spec_.tokens_per_item - 1);
    std::uniform_int_distribution<std::size_t> pick_word(0, spec_.vocab - 1);
    std::bernoulli_distribution noisy(spec_.noise_rate);
    const std::size_t src = pick_doc(rng_);
    std::vector<std::size_t> words(spec_.query_tokens);
    for (auto& w : words) {
      w = doc_words_[src][pick_token(rng_)];
      if (noisy(rng_)) w = pick_word(rng_);
    }
    CorpusItem q;
    q.id = id;
    q.kind = ItemKind::kQuery;
    q.text = Join(words);
    if (spec_.visual_dim > 0) {
      std::normal_distribution<double> noise(0.0, spec_.visual_noise);
      q.visual_vecs = Jittered(doc_centers_[src], noise);
    }
    return {std::move(q), src};
  }

 private:
  static std::string Join(const std::vector<std::size_t>& words) {
    std::string s;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) s += ' ';
      s += Word(words[i]);
    }
    return s;
  }

  std::vector<std::vector<double>> Jittered(const std::vector<double>& center,
                                            std::normal_distribution<double>& noise) {
    std::vector<std::vector<double>> vecs(spec_.visual_per_item, center);
    for (auto& v : vecs) {
      for (double& x : v) x += noise(rng_);
    }
    return vecs;
  }

  const SynthSpec& spec_;
  std::mt19937_64 rng_;
  std::size_t words_per_topic_;
  std::vector<std::discrete_distribution<std::size_t>> topic_words_;
  std::vector<std::vector<double>> prototypes_;
  std::vector<std::vector<std::size_t>> doc_words_;
  std::vector<std::vector<double>> doc_centers_;
};

}  // namespace

void SynthSpec::Validate() const {
  if (n_topics == 0 || n_docs == 0 || n_queries == 0 || tokens_per_item == 0 ||
      query_tokens == 0 || vocab == 0) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic counts must be positive");
  }
  if (vocab < n_topics) {
    throw Error(ErrorCode::kInvalidArgument, "vocab must give every topic at least one word");
  }
  if (!(topic_concentration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "topic_concentration must be > 0");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_rate must lie in [0, 1]");
  }
  if (visual_dim > 0 && (visual_per_item == 0 || !(visual_noise >= 0.0) ||
                         !(visual_spread >= 0.0))) {
    throw Error(ErrorCode::kInvalidArgument, "invalid visual settings");
  }
}

SynthCorpus generate_synthetic(const SynthSpec& spec) {
  spec.Validate();
  SynthCorpus out;
  Generator gen(spec);
  gen.Documents(out);
  for (std::size_t i = 0; i < spec.n_queries; ++i) {
    auto [q, src] = gen.Query(Id("q", i));
    out.qrels[q.id].insert(out.documents[src].id);
    out.queries.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < spec.n_train_queries; ++i) {
    auto [q, src] = gen.Query(Id("tq", i));
    out.train_pairs.push_back({std::move(q), out.documents[src]});
  }
  return out;
}

}  // namespace ofar
