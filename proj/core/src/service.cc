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

#include "ofar/service.h"

#include "httplib.h"
#include "json.hpp"
#include "ofar/corpus.h"
#include "ofar/error.h"

namespace ofar {

namespace {

using nlohmann::json;

SearchService::Response JsonResponse(int status, const json& body) {
  return {status, body.dump()};
}

SearchService::Response ErrorResponse(int status, const std::string& message) {
  return JsonResponse(status, {{"error", message}});
}

SearchRequest ParseRequest(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("body must be a JSON object");
  SearchRequest req;
  if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw std::invalid_argument("'text' must be a string");
    req.text = it->get<std::string>();
  }
  if (auto it = j.find("visual_vecs"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw std::invalid_argument("'visual_vecs' must be an array");
    std::vector<std::vector<double>> vecs;
    for (const auto& v : *it) {
      if (!v.is_array()) throw std::invalid_argument("'visual_vecs' entries must be arrays");
      std::vector<double> row;
      for (const auto& x : v) {
        if (!x.is_number()) throw std::invalid_argument("visual entries must be numbers");
        row.push_back(x.get<double>());
      }
      vecs.push_back(std::move(row));
    }
    req.visual_vecs = std::move(vecs);
  }
  if (auto it = j.find("k"); it != j.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
      throw std::invalid_argument("'k' must be a positive integer");
    }
    req.k = it->get<std::size_t>();
  }
  if (auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) throw std::invalid_argument("'mode' must be a string");
    const auto mode = it->get<std::string>();
    if (mode == "All") {
      req.mode = ModalityMode::kAll;
    } else if (mode == "Vision") {
      req.mode = ModalityMode::kVision;
    } else if (mode == "Text") {
      req.mode = ModalityMode::kText;
    } else {
      throw std::invalid_argument("'mode' must be All, Vision or Text");
    }
  }
  if (auto it = j.find("exact"); it != j.end()) {
    if (!it->is_boolean()) throw std::invalid_argument("'exact' must be a boolean");
    req.exact = it->get<bool>();
  }
  if (auto it = j.find("probe"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
      throw std::invalid_argument("'probe' must be a positive integer");
    }
    req.probe = it->get<std::size_t>();
  }
  return req;
}

}  // namespace

RankedHits run_search(const RetrievalIndex& index, const EncoderParams& query_encoder,
                      const SearchRequest& request) {
  CorpusItem item;
  item.id = "query";
  item.kind = ItemKind::kQuery;
  item.text = request.text;
  item.visual_vecs = request.visual_vecs;
  FilteredItem f = apply_modality_filter(item, request.mode);
  if (f.skipped) throw Error(ErrorCode::kEmptyItem, "query is empty under the selected modality");
  CoreConfig core{index.dim(), index.pad_len(), 0};
  EncodedItem encoded = encode(f.item, query_encoder, core);
  return request.exact ? index.SearchExact(encoded.matrix, request.k)
                       : index.SearchApprox(encoded.matrix, request.k, request.probe);
}

std::string make_snippet(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t end = max_bytes;
  // Back off continuation bytes so a code point is never split.
  while (end > 0 && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) --end;
  return std::string(text.substr(0, end));
}

SearchService::SearchService(RetrievalIndex index, EncoderParams query_encoder,
                             std::vector<CorpusItem> documents)
    : index_(std::move(index)),
      query_encoder_(std::move(query_encoder)),
      documents_(std::move(documents)) {
  if (query_encoder_.shape.dim != index_.dim()) {
    throw Error(ErrorCode::kDimMismatch, "query encoder dim differs from index dim");
  }
  for (std::size_t i = 0; i < documents_.size(); ++i) doc_lookup_.emplace(documents_[i].id, i);
}

SearchService::Response SearchService::Search(std::string_view body) const {
  SearchRequest req;
  try {
    req = ParseRequest(json::parse(body));
  } catch (const json::exception& e) {
    return ErrorResponse(400, std::string("malformed body: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return ErrorResponse(400, e.what());
  }
  RankedHits hits;
  try {
    hits = run_search(index_, query_encoder_, req);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyItem) {
      return ErrorResponse(422, "query empty under selected modality");
    }
    return ErrorResponse(400, e.what());
  }
  json out_hits = json::array();
  for (const auto& h : hits.entries) {
    json attributions = json::array();
    for (const auto& a : h.attributions) {
      attributions.push_back(
          {{"q_token_index", a.query_row}, {"d_token_index", a.doc_row}, {"sim", a.similarity}});
    }
    std::string snippet;
    if (auto it = doc_lookup_.find(h.doc_id); it != doc_lookup_.end()) {
      snippet = make_snippet(documents_[it->second].text.value_or(""));
    }
    out_hits.push_back({{"doc_id", h.doc_id},
                        {"score", h.score},
                        {"text_snippet", snippet},
                        {"attributions", std::move(attributions)}});
  }
  return JsonResponse(200, {{"hits", std::move(out_hits)}});
}

SearchService::Response SearchService::Document(const std::string& id) const {
  auto it = doc_lookup_.find(id);
  if (it == doc_lookup_.end()) return ErrorResponse(404, "unknown document '" + id + "'");
  return {200, corpus_item_to_json(documents_[it->second])};
}

SearchService::Response SearchService::Health() const {
  return JsonResponse(200, {{"status", "ok"},
                            {"corpus_size", index_.size()},
                            {"dim", index_.dim()}});
}

struct HttpServer::Impl {
  const SearchService& service;
  httplib::Server server;

  explicit Impl(const SearchService& s) : service(s) {
    auto reply = [](httplib::Response& res, const SearchService::Response& r) {
      res.status = r.status;
      res.set_content(r.body, "application/json; charset=utf-8");
    };
    server.Post("/api/search", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.Search(req.body));
    });
    server.Get(R"(/api/doc/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.Document(req.matches[1]));
    });
    server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service.Health());
    });
  }
};

HttpServer::HttpServer(const SearchService& service)
    : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace ofar
