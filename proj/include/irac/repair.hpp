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

#include <string>
#include <string_view>

namespace irac {

// Removes a surrounding ``` / ```json fence when one is present; otherwise
// returns the input unchanged.
std::string strip_code_fences(std::string_view raw);

// Pulls the outermost balanced {...} span out of LLM output: strips code
// fences, then scans from the first '{' tracking string literals and escapes
// until the matching '}'. The result may still fail to parse. Throws
// NoObjectFound when there is no '{' or the first object never closes.
std::string repair_json(std::string_view raw);

}  // namespace irac
