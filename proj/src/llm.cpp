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

#include "irac/llm.hpp"

#include <algorithm>
#include <thread>

#include "irac/fsutil.hpp"
#include "irac/hashing.hpp"

namespace irac::llm {

namespace fs = std::filesystem;

std::string_view to_string(FinishState state) {
  switch (state) {
    case FinishState::Complete: return "complete";
    case FinishState::Truncated: return "truncated";
    case FinishState::Refused: return "refused";
  }
  return "";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Live: return "live";
    case Provenance::Cache: return "cache";
    case Provenance::Replay: return "replay";
  }
  return "";
}

namespace {

std::optional<FinishState> parse_finish(std::string_view name) {
  for (auto s : {FinishState::Complete, FinishState::Truncated, FinishState::Refused}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

}  // namespace

LlmResponse make_response(std::string text, FinishState finish, Provenance provenance) {
  if (text.empty() && finish == FinishState::Complete) finish = FinishState::Truncated;
  return LlmResponse{std::move(text), finish, provenance};
}

nlohmann::ordered_json request_json(const LlmRequest& request) {
  nlohmann::ordered_json j;
  j["prompt"] = request.prompt;
  j["model_tag"] = request.model_tag;
  j["temperature"] = request.temperature;
  j["max_output"] = request.max_output;
  return j;
}

std::string cache_key(const LlmRequest& request) { return sha256_hex(request_json(request).dump()); }

// ---------------------------------------------------------------------------

fs::path ResponseStore::path_for(std::string_view key) const {
  return root_ / std::string(key.substr(0, 2)) / (std::string(key) + ".json");
}

std::optional<LlmResponse> ResponseStore::load(const LlmRequest& request) const {
  const auto raw = fsutil::read_file(path_for(cache_key(request)));
  if (!raw) return std::nullopt;
  const auto doc = nlohmann::json::parse(*raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  try {
    if (doc.at("request") != nlohmann::json(request_json(request))) return std::nullopt;
    const auto& resp = doc.at("response");
    const auto finish = parse_finish(resp.at("finish_state").get<std::string>());
    if (!finish) return std::nullopt;
    return make_response(resp.at("text").get<std::string>(), *finish, Provenance::Cache);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

std::string ResponseStore::save(const LlmRequest& request, const LlmResponse& response) const {
  const std::string key = cache_key(request);
  nlohmann::ordered_json doc;
  doc["request"] = request_json(request);
  doc["response"] = {{"text", response.text}, {"finish_state", to_string(response.finish)}};
  fsutil::atomic_write_cache(path_for(key), doc.dump(2) + "\n");
  return key;
}

std::string record_fixture(const LlmRequest& request, const LlmResponse& response, const fs::path& store) {
  return ResponseStore(store).save(request, response);
}

LlmResponse ReplayBackend::complete(const LlmRequest& request) {
  auto hit = store_.load(request);
  if (!hit) {
    throw Error(ErrorCode::BackendUnavailable, "no replay fixture for key " + cache_key(request) + " in " +
                                                   store_.root().string());
  }
  hit->provenance = Provenance::Replay;
  return *hit;
}

LlmResponse CachingBackend::complete(const LlmRequest& request) {
  if (auto hit = store_.load(request)) return *hit;
  LlmResponse response = upstream_->complete(request);
  store_.save(request, response);
  return response;
}

// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<LlmBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)), jitter_(std::random_device{}()) {
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::chrono::milliseconds Gateway::backoff(int attempt) {
  const auto& p = options_.retry;
  double ceiling = static_cast<double>(p.base_delay.count());
  for (int i = 0; i < attempt; ++i) ceiling *= 2.0;
  ceiling = std::min(ceiling, static_cast<double>(p.max_delay.count()));
  std::lock_guard lock(jitter_mutex_);
  std::uniform_real_distribution<double> dist(ceiling / 2.0, ceiling);
  return std::chrono::milliseconds(static_cast<long long>(dist(jitter_)));
}

LlmResponse Gateway::call_backend(const LlmRequest& request) {
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    Gateway* self;
    ~Release() {
      {
        std::lock_guard lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};
  return backend_->complete(request);
}

LlmResponse Gateway::complete(const LlmRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorCode::BackendUnavailable, "empty prompt");
  for (int attempt = 0;; ++attempt) {
    try {
      LlmResponse response = call_backend(request);
      if (response.finish == FinishState::Refused) {
        throw Error(ErrorCode::Refused, "model refused the request");
      }
      return response;
    } catch (const TransientError& e) {
      if (attempt + 1 >= options_.retry.max_attempts) throw Error(e.code(), e.what());
      options_.sleep(backoff(attempt));
    }
  }
}

LlmResponse Gateway::complete_cached(const LlmRequest& request, const fs::path& store) {
  ResponseStore cache(store);
  if (auto hit = cache.load(request)) {
    if (hit->finish == FinishState::Refused) throw Error(ErrorCode::Refused, "model refused the request (cached)");
    return *hit;
  }
  LlmResponse response = complete(request);
  cache.save(request, response);
  return response;
}

}  // namespace irac::llm
