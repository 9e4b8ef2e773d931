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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "irac/graph_query.hpp"
#include "irac/kg.hpp"
#include "irac/llm.hpp"

namespace irac {

inline constexpr std::string_view kDefaultSftSystemPrompt =
    "You are a legal analysis assistant. Given case facts, identify the legal issue, the applicable legal rules, "
    "and explain why they apply.";

// Stable 16-hex-digit id for a generated record, derived from what it is
// about. `kind` separates SFT ("sft") from preference ("dpo") records.
std::string record_id(std::string_view kind, std::string_view case_id, std::string_view issue_id);

// The six parts of the model's <sft_data> document.
struct SftPayload {
  std::string instruction;
  std::vector<std::string> facts;
  std::string output_format;
  std::string legal_issue;
  std::vector<std::string> rules;
  std::string explanation;
};

// Tolerates code fences, prose around the document, and pretty-printed
// element boundaries. Text content is trimmed and XML-unescaped. Throws
// SftXmlError naming the first missing tag.
SftPayload parse_sft_output(std::string_view xml);

// Facts and rules are rendered one label per line in set order.
std::string render_sft_prompt(const FactSet& facts, const Entity& issue, const RuleSet& rules);

struct SftRecord {
  std::string case_id;
  std::string issue_id;
  std::vector<std::string> facts;
  std::string legal_issue;
  std::vector<std::string> rules;
  std::string explanation;
  std::string instruction;
  std::string output_format;

  std::string record_id() const { return irac::record_id("sft", case_id, issue_id); }
};

struct ChatTrainingRecord {
  std::string system;
  std::string user;
  std::string assistant;
  std::string case_id;
  std::string issue_id;
  std::string record_id;

  // {"system","user","assistant","meta":{"case_id","issue_id","record_id"}}
  nlohmann::ordered_json to_json() const;
};

// user = instruction, <case_facts> block, output format; assistant = the
// <legal_analysis> document built from the issue, rules and explanation.
ChatTrainingRecord to_chat_record(const SftRecord& record,
                                  std::string_view system_prompt = kDefaultSftSystemPrompt);

enum class SftSkip { None, NoFacts, NoRules, LlmFailure };

struct SftOutcome {
  std::optional<SftRecord> record;
  SftSkip skip = SftSkip::None;
  std::string reason;
};

struct SftOptions {
  std::string model_tag = std::string(llm::kDefaultModelTag);
  int max_output = 4096;
  std::string system_prompt = std::string(kDefaultSftSystemPrompt);
};

// Builds one record for one legal issue. Skips (no record, reason set) when
// the issue has no related facts or no applicable rules, or when the gateway
// fails. Throws NotAnIssue, SftXmlError, and Error(EchoMismatch) when the
// model did not reproduce the facts, issue or rules it was given.
SftOutcome gen_sft(const IracGraph& graph, std::string_view issue_id, llm::Gateway& gateway,
                   const SftOptions& options = {});

struct SftSummary {
  std::size_t records = 0;
  std::size_t skipped_no_facts = 0;
  std::size_t skipped_no_rules = 0;
  std::size_t echo_failures = 0;
  std::size_t malformed_outputs = 0;
  std::size_t llm_failures = 0;

  bool operator==(const SftSummary&) const = default;
};

// Every LegalIssue of every graph, in (case_id, issue id) order. Per-case
// results go to <out>/shards/sft/<case_id>.json, keyed by a digest of the graph
// and options, so re-runs reuse them without gateway calls; cases that hit a
// gateway failure are not stored and get retried. All shards are merged into
// <out>/sft.jsonl.
SftSummary run_sft_generation(const std::vector<IracGraph>& graphs, llm::Gateway& gateway,
                              const std::filesystem::path& out, const SftOptions& options = {},
                              std::size_t jobs = 1);

}  // namespace irac
