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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ofar/corpus_item.h"
#include "ofar/encoder.h"
#include "ofar/eval.h"
#include "ofar/index.h"

namespace ofar {

struct SearchRequest {
  std::optional<std::string> text;
  std::optional<std::vector<std::vector<double>>> visual_vecs;
  std::size_t k = 10;
  ModalityMode mode = ModalityMode::kAll;
  bool exact = true;
  std::size_t probe = kDefaultProbe;
};

// Encodes the request with the query encoder (after the modality filter) and
// searches the index. Both the CLI and the HTTP API go through here. Throws
// kEmptyItem when nothing is left to encode.
RankedHits run_search(const RetrievalIndex& index, const EncoderParams& query_encoder,
                      const SearchRequest& request);

// Request handling for the read-only search API, independent of transport.
class SearchService {
 public:
  struct Response {
    int status = 200;
    std::string body;  // JSON
  };

  SearchService(RetrievalIndex index, EncoderParams query_encoder,
                std::vector<CorpusItem> documents);

  // POST /api/search
  Response Search(std::string_view body) const;
  // GET /api/doc/{id}
  Response Document(const std::string& id) const;
  // GET /api/health
  Response Health() const;

  const RetrievalIndex& index() const { return index_; }

 private:
  RetrievalIndex index_;
  EncoderParams query_encoder_;
  std::vector<CorpusItem> documents_;
  std::unordered_map<std::string, std::size_t> doc_lookup_;
};

// UTF-8-safe prefix of at most max_bytes bytes.
std::string make_snippet(std::string_view text, std::size_t max_bytes = 160);

// cpp-httplib transport over a SearchService. Handlers run concurrently and
// only read the service.
class HttpServer {
 public:
  explicit HttpServer(const SearchService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until Stop(). Returns false if the socket could not be bound.
  bool Listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); follow with
  // ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ofar
