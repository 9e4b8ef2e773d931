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

#include "irac/llm_http.hpp"

#include <cstdlib>

#include "httplib.h"

namespace irac::llm {

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (const char* key = std::getenv(options_.api_key_env.c_str())) api_key_ = key;

  const std::string& url = options_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::BackendUnavailable, "base url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

LlmResponse HttpBackend::complete(const LlmRequest& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  nlohmann::json body;
  body["model"] = request.model_tag;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output;

  const auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw TransientError(ErrorCode::BackendUnavailable, "connection to " + origin_ + " failed: " +
                                                            httplib::to_string(res.error()));
  }
  if (res->status == 429) throw TransientError(ErrorCode::RateLimited, "HTTP 429 from " + origin_);
  if (res->status == 408 || res->status >= 500) {
    throw TransientError(ErrorCode::BackendUnavailable, "HTTP " + std::to_string(res->status) + " from " + origin_);
  }
  if (res->status != 200) {
    throw Error(ErrorCode::BackendUnavailable, "HTTP " + std::to_string(res->status) + " from " + origin_);
  }

  const auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::BackendUnavailable, "response body is not JSON");
  try {
    const auto& choice = doc.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    std::string text = content.is_string() ? content.get<std::string>() : std::string();
    FinishState finish = FinishState::Complete;
    if (const auto reason = choice.find("finish_reason"); reason != choice.end() && reason->is_string()) {
      if (*reason == "length") finish = FinishState::Truncated;
      if (*reason == "content_filter") finish = FinishState::Refused;
    }
    return make_response(std::move(text), finish, Provenance::Live);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("unexpected response shape: ") + e.what());
  }
}

}  // namespace irac::llm
