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

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "irac/kg.hpp"
#include "irac/review.hpp"

namespace httplib {
class Server;
}

namespace irac::review {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  // Required as "Authorization: Bearer <token>" when non-empty.
  std::string token;
  std::size_t default_page = 100;
  std::size_t max_page = 1000;
};

// JSON API under /v1:
//   GET  /v1/batches                        batch summaries
//   POST /v1/batches                        {"n_cases","seed","kinds"?}
//   GET  /v1/batches/{id}/items?cursor=&limit=
//   POST /v1/labels                         {"batch_id", label fields}
//   POST /v1/batches/{id}/derive
//   GET  /v1/batches/{id}/quality
//   GET  /v1/batches/{id}/record-quality
//   POST /v1/batches/{id}/close
// Errors come back as {"error":{"code","message"}} with 400/401/404/409.
class ReviewServer {
 public:
  ReviewServer(ReviewStore& store, std::vector<IracGraph> graphs, std::vector<RecordForReview> records,
               ServerOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Blocks until stop(). Returns false when the address cannot be bound.
  bool listen();
  // Binds an ephemeral port on options.host and returns it (for tests); then
  // call listen_after_bind().
  int bind_any_port();
  bool listen_after_bind();
  void stop();

 private:
  void routes();

  ReviewStore& store_;
  std::vector<IracGraph> graphs_;
  std::vector<RecordForReview> records_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace irac::review
