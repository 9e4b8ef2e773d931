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

#include "irac/prompts.hpp"

#include "irac/prompt_assets.hpp"

namespace irac::prompts {

std::string_view kg_extraction_template() { return assets::kKgExtraction; }
std::string_view sft_generation_template() { return assets::kSftGeneration; }
std::string_view rule_judge_template() { return assets::kRuleJudge; }

}  // namespace irac::prompts
