// Copyright 2026 The IRAC-KG Authors.
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

#include "irac/review_http.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>

#include "irac/errors.hpp"

namespace irac::review {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownBatch:
    case ErrorCode::UnknownItem: return 404;
    case ErrorCode::ClosedBatch: return 409;
    case ErrorCode::IoError: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

// Same running time for every candidate of the right length.
bool token_matches(std::string_view expected, std::string_view given) {
  if (expected.size() != given.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    diff |= static_cast<unsigned char>(expected[i] ^ given[i]);
  }
  return diff == 0;
}

nlohmann::ordered_json summary_json(const ReviewBatch& b) {
  std::size_t graded = 0;
  std::set<ItemRef> seen;
  for (const auto& [key, _] : b.labels) {
    if (key.first.kind != ItemKind::MissingFlag && seen.insert(key.first).second) ++graded;
  }
  return {{"id", b.id},          {"cases", b.cases},          {"items", b.items.size()},
          {"graded_items", graded}, {"labels", b.labels.size()}, {"closed", b.closed}};
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidLabel, "request body must be a JSON object");
  return j;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

}  // namespace

ReviewServer::ReviewServer(ReviewStore& store, std::vector<IracGraph> graphs, std::vector<RecordForReview> records,
                           ServerOptions options)
    : store_(store),
      graphs_(std::move(graphs)),
      records_(std::move(records)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

ReviewServer::~ReviewServer() = default;

void ReviewServer::routes() {
  httplib::Server& s = *server_;

  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (options_.token.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const std::string auth = req.get_header_value("Authorization");
    const std::string_view prefix = "Bearer ";
    if (auth.size() > prefix.size() && auth.compare(0, prefix.size(), prefix) == 0 &&
        token_matches(options_.token, std::string_view(auth).substr(prefix.size()))) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    send_error(res, 401, "Unauthorized", "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });

  s.Get("/v1/batches", guarded([this](const httplib::Request&, httplib::Response& res) {
          nlohmann::ordered_json out = nlohmann::ordered_json::array();
          for (const auto& b : store_.list()) out.push_back(summary_json(*b));
          send_json(res, 200, {{"batches", out}});
        }));

  s.Post("/v1/batches", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           BatchSpec spec;
           if (auto n = body.find("n_cases"); n != body.end()) {
             if (!n->is_number_unsigned()) throw Error(ErrorCode::InvalidLabel, "n_cases must be a positive integer");
             spec.n_cases = n->get<std::size_t>();
           }
           if (auto seed = body.find("seed"); seed != body.end()) {
             if (!seed->is_number_unsigned()) throw Error(ErrorCode::InvalidLabel, "seed must be a non-negative integer");
             spec.seed = seed->get<std::uint64_t>();
           }
           if (auto kinds = body.find("kinds"); kinds != body.end()) {
             if (!kinds->is_array()) throw Error(ErrorCode::InvalidLabel, "kinds must be an array");
             spec.kinds.clear();
             for (const auto& k : *kinds) {
               const auto kind = k.is_string() ? parse_item_kind(k.get<std::string>()) : std::nullopt;
               if (!kind || *kind == ItemKind::MissingFlag) throw Error(ErrorCode::InvalidLabel, "bad item kind");
               spec.kinds.push_back(*kind);
             }
           }
           const auto batch = store_.create(graphs_, spec, records_);
           send_json(res, 201, summary_json(*batch));
         }));

  s.Get(R"(/v1/batches/([^/]+)/items)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto batch = store_.get(req.matches[1].str());
          std::size_t cursor = 0;
          std::size_t limit = options_.default_page;
          try {
            if (req.has_param("cursor") && !req.get_param_value("cursor").empty()) {
              cursor = std::stoul(req.get_param_value("cursor"));
            }
            if (req.has_param("limit")) limit = std::stoul(req.get_param_value("limit"));
          } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidLabel, "cursor and limit must be non-negative integers");
          }
          limit = std::clamp<std::size_t>(limit, 1, options_.max_page);
          nlohmann::ordered_json items = nlohmann::ordered_json::array();
          const std::size_t end = std::min(batch->items.size(), cursor + limit);
          for (std::size_t i = cursor; i < end; ++i) {
            nlohmann::ordered_json item = item_json(batch->items[i]);
            nlohmann::ordered_json labels = nlohmann::ordered_json::array();
            for (auto it = batch->labels.lower_bound({batch->items[i].ref, std::string()});
                 it != batch->labels.end() && it->first.first == batch->items[i].ref; ++it) {
              labels.push_back({{"reviewer", it->second.reviewer}, {"value", label_value_json(it->second.value)}});
            }
            item["labels"] = std::move(labels);
            items.push_back(std::move(item));
          }
          nlohmann::ordered_json out;
          out["batch_id"] = batch->id;
          out["items"] = std::move(items);
          out["next_cursor"] = end < batch->items.size() ? nlohmann::ordered_json(std::to_string(end)) : nlohmann::ordered_json(nullptr);
          send_json(res, 200, out);
        }));

  s.Post("/v1/labels", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           auto id = body.find("batch_id");
           if (id == body.end() || !id->is_string()) throw Error(ErrorCode::InvalidLabel, "missing batch_id");
           ReviewLabel label = label_from_json(body);
           const SubmitAck ack = store_.submit(id->get<std::string>(), std::move(label));
           send_json(res, 200, {{"ok", true}, {"overwrote", ack.overwrote}, {"audit_entries", ack.audit_entries}});
         }));

  s.Post(R"(/v1/batches/([^/]+)/derive)", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const DeriveResult r = store_.derive(req.matches[1].str());
           auto ids = [](const std::vector<ItemRef>& refs) {
             nlohmann::ordered_json out = nlohmann::ordered_json::array();
             for (const auto& ref : refs) out.push_back({{"case_id", ref.case_id}, {"target_id", ref.target_id}});
             return out;
           };
           send_json(res, 200, {{"failed", ids(r.failed)}, {"reopened", ids(r.reopened)}, {"pending", ids(r.pending)}});
         }));

  s.Get(R"(/v1/batches/([^/]+)/quality)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, aggregate_quality(*store_.get(req.matches[1].str())).to_json());
        }));

  s.Get(R"(/v1/batches/([^/]+)/record-quality)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto batch = store_.get(req.matches[1].str());
          nlohmann::ordered_json out = aggregate_record_quality(*batch).to_json();
          out["batch_id"] = batch->id;
          send_json(res, 200, out);
        }));

  s.Post(R"(/v1/batches/([^/]+)/close)", guarded([this](const httplib::Request& req, httplib::Response& res) {
           store_.close(req.matches[1].str());
           send_json(res, 200, summary_json(*store_.get(req.matches[1].str())));
         }));
}

bool ReviewServer::listen() { return server_->listen(options_.host, options_.port); }

int ReviewServer::bind_any_port() { return server_->bind_to_any_port(options_.host); }

bool ReviewServer::listen_after_bind() { return server_->listen_after_bind(); }

void ReviewServer::stop() { server_->stop(); }

}  // namespace irac::review
