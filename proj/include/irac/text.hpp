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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace irac::text {

// True when bytes form well-formed UTF-8 (no overlongs, no surrogates) and
// contain no NUL byte. NUL is rejected because a text opinion never has one
// and binary files almost always do.
bool is_valid_utf8(std::string_view bytes);

std::string_view trim(std::string_view s);

// Collapses whitespace runs to one space, trims, and maps curly quotes to
// their ASCII forms. Used for echo comparisons and label matching.
std::string normalize(std::string_view s);

std::string xml_escape(std::string_view s);
std::string xml_unescape(std::string_view s);

// Single-pass substitution of {name} placeholders. Substituted values are
// never re-scanned, and braces that do not name a known key are kept.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Joins with '\n', no trailing newline.
std::string join_lines(const std::vector<std::string>& lines);

}  // namespace irac::text
