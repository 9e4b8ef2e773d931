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
#include <string>

#include "irac/llm.hpp"

namespace irac::llm {

inline constexpr const char* kDefaultApiKeyEnv = "IRAC_LLM_API_KEY";

struct HttpBackendOptions {
  // OpenAI-compatible base; requests go to <base_url>/chat/completions.
  std::string base_url = "https://api.openai.com/v1";
  // Name of the environment variable holding the bearer token. The token is
  // read once at construction and never written anywhere.
  std::string api_key_env = kDefaultApiKeyEnv;
  std::chrono::seconds timeout{120};
};

// Live completion over HTTP(S). 429 maps to TransientError(RateLimited);
// 408, 5xx and connection failures to TransientError(BackendUnavailable);
// other statuses are final. finish_reason "length" marks the response
// truncated and "content_filter" refused.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  LlmResponse complete(const LlmRequest& request) override;

 private:
  HttpBackendOptions options_;
  std::string api_key_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // "/v1"
};

}  // namespace irac::llm
