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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "irac/errors.hpp"

namespace irac::llm {

inline constexpr std::string_view kDefaultModelTag = "claude-3-5-sonnet";

struct LlmRequest {
  std::string prompt;
  std::string model_tag = std::string(kDefaultModelTag);
  double temperature = 0.0;
  int max_output = 4096;
};

enum class FinishState { Complete, Truncated, Refused };
enum class Provenance { Live, Cache, Replay };

std::string_view to_string(FinishState state);
std::string_view to_string(Provenance provenance);

struct LlmResponse {
  std::string text;
  FinishState finish = FinishState::Complete;
  Provenance provenance = Provenance::Live;
};

// An empty text can never be a complete answer; such responses are marked
// truncated.
LlmResponse make_response(std::string text, FinishState finish, Provenance provenance);

// Canonical JSON of the four request fields, key order fixed.
nlohmann::ordered_json request_json(const LlmRequest& request);

// Lowercase hex SHA-256 of request_json(request).dump(). Equal requests give
// equal keys on every machine.
std::string cache_key(const LlmRequest& request);

// Errors a backend raises when a retry may succeed (rate limits, 5xx,
// dropped connections). Everything else is final.
class TransientError : public Error {
 public:
  using Error::Error;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

// Files laid out as <root>/<first 2 hex of key>/<key>.json holding
// {"request": ..., "response": {"text", "finish_state"}}. Used for both the
// response cache and frozen test fixtures. Writes are atomic.
class ResponseStore {
 public:
  explicit ResponseStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_for(std::string_view key) const;

  // nullopt when the entry is absent, unreadable, corrupt, or was written for
  // a different request.
  std::optional<LlmResponse> load(const LlmRequest& request) const;

  // Returns the key. Throws CacheIoError.
  std::string save(const LlmRequest& request, const LlmResponse& response) const;

 private:
  std::filesystem::path root_;
};

// Freezes a response so ReplayBackend can serve it. Last write wins.
std::string record_fixture(const LlmRequest& request, const LlmResponse& response,
                           const std::filesystem::path& store);

// Serves recorded fixtures only. A missing key is BackendUnavailable; replay
// never fabricates.
class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(std::filesystem::path fixtures) : store_(std::move(fixtures)) {}
  LlmResponse complete(const LlmRequest& request) override;

 private:
  ResponseStore store_;
};

// Read-through cache in front of another backend.
class CachingBackend : public LlmBackend {
 public:
  CachingBackend(std::shared_ptr<LlmBackend> upstream, std::filesystem::path store)
      : upstream_(std::move(upstream)), store_(std::move(store)) {}
  LlmResponse complete(const LlmRequest& request) override;

 private:
  std::shared_ptr<LlmBackend> upstream_;
  ResponseStore store_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30'000};
};

struct GatewayOptions {
  std::size_t max_in_flight = 4;
  RetryPolicy retry;
  // Injected by tests to avoid real sleeps.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// The entry point every pipeline stage calls. Shareable across threads: at
// most max_in_flight backend calls run at once, transient failures are
// retried with exponential backoff and jitter, and a refused completion
// surfaces as Error(Refused).
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<LlmBackend> backend, GatewayOptions options = {});

  // Throws BackendUnavailable, RateLimited, Refused.
  LlmResponse complete(const LlmRequest& request);

  // Checks `store` first; on a miss calls complete() and persists the result.
  // Throws as complete(), plus CacheIoError.
  LlmResponse complete_cached(const LlmRequest& request, const std::filesystem::path& store);

 private:
  LlmResponse call_backend(const LlmRequest& request);
  std::chrono::milliseconds backoff(int attempt);

  std::shared_ptr<LlmBackend> backend_;
  GatewayOptions options_;
  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
  std::mutex jitter_mutex_;
  std::mt19937_64 jitter_;
};

}  // namespace irac::llm
