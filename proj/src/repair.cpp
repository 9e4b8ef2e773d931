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

#include "irac/repair.hpp"

#include <optional>

#include <nlohmann/json.hpp>

#include "irac/errors.hpp"
#include "irac/text.hpp"

namespace irac {

std::string strip_code_fences(std::string_view raw) {
  const std::size_t open = raw.find("```");
  if (open == std::string_view::npos) return std::string(raw);
  std::size_t body = raw.find('\n', open);
  if (body == std::string_view::npos) return std::string(raw);
  ++body;
  const std::size_t close = raw.find("```", body);
  const std::string_view inner =
      close == std::string_view::npos ? raw.substr(body) : raw.substr(body, close - body);
  return std::string(text::trim(inner));
}

namespace {

// End index (exclusive) of the balanced object starting at `start`.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string repair_json(std::string_view raw) {
  const std::string stripped = strip_code_fences(raw);
  const std::string_view s = stripped;

  // Prefer the first balanced span that is actual JSON; prose such as
  // "use {braces}" ahead of the payload would otherwise win.
  std::optional<std::string_view> first_balanced;
  for (std::size_t pos = s.find('{'); pos != std::string_view::npos; pos = s.find('{', pos + 1)) {
    const auto end = balanced_end(s, pos);
    if (!end) continue;
    const std::string_view span = s.substr(pos, *end - pos);
    if (nlohmann::json::accept(span)) return std::string(span);
    if (!first_balanced) first_balanced = span;
  }
  if (first_balanced) return std::string(*first_balanced);
  throw Error(ErrorCode::NoObjectFound, "no balanced {...} object in model output");
}

}  // namespace irac
