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

// Per-case result shards shared by the SFT and preference generators.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "irac/fsutil.hpp"

namespace irac::detail {

inline std::filesystem::path shard_path(const std::filesystem::path& out, const std::string& kind,
                                        const std::string& case_id) {
  return out / "shards" / kind / (case_id + ".json");
}

// The shard's payload when it exists and was produced from the same inputs.
inline std::optional<nlohmann::ordered_json> load_shard(const std::filesystem::path& path,
                                                        const std::string& input_digest) {
  const auto raw = fsutil::read_file(path);
  if (!raw) return std::nullopt;
  auto doc = nlohmann::ordered_json::parse(*raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("input_digest") || !doc.contains("payload") ||
      doc["input_digest"] != input_digest) {
    return std::nullopt;
  }
  return doc["payload"];
}

inline void save_shard(const std::filesystem::path& path, const std::string& input_digest,
                       const nlohmann::ordered_json& payload) {
  nlohmann::ordered_json doc;
  doc["input_digest"] = input_digest;
  doc["payload"] = payload;
  fsutil::atomic_write(path, doc.dump() + "\n");
}

}  // namespace irac::detail
