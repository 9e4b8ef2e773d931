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

inline constexpr std::string_view kDefaultDpoSystemPrompt =
    "You are a legal analysis assistant. Given case facts and a legal issue, identify the legal rules that apply "
    "to the issue.";

enum class Applicability { Yes, No, Potentially };
std::string_view to_string(Applicability a);
// Case-insensitive; surrounding whitespace and a trailing '.' are ignored.
std::optional<Applicability> parse_applicability(std::string_view s);

struct JudgeVerdict {
  std::string rule_id;     // the candidate this verdict was matched to
  std::string rule_label;  // the candidate's label, as rendered in the prompt
  Applicability applicability = Applicability::Potentially;
  std::string reasoning;

  bool operator==(const JudgeVerdict&) const = default;
};

// Facts, chosen rules and candidates one label per line, in set order.
std::string render_judge_prompt(const FactSet& facts, const Entity& issue, const RuleSet& chosen,
                                const RuleSet& candidates);

// Parses {"Rules":[{"Rule","Applicability","Reasoning"}, ...]} (after
// repair_json). Each "Rule" is matched to a candidate by normalized label.
// Throws JudgeParseFailure on bad JSON, a missing "Rules" array, an unknown
// applicability, or a rule matching no candidate.
std::vector<JudgeVerdict> parse_judge_output(std::string_view text, const RuleSet& candidates);

// Per-entry variant used by gen_pref: well-formed entries become verdicts,
// and `failed_ids` lists candidates whose entry was malformed. Only throws
// when the document as a whole cannot be read.
struct JudgeParse {
  std::vector<JudgeVerdict> verdicts;
  std::vector<std::string> failed_ids;
  std::vector<std::string> problems;
};
JudgeParse parse_judge_entries(std::string_view text, const RuleSet& candidates);

struct PrefRecord {
  std::string case_id;
  std::string issue_id;
  std::vector<std::string> facts;
  std::string legal_issue;
  std::vector<std::string> chosen_rule_ids;
  std::vector<std::string> chosen_rules;
  std::vector<std::string> rejected_rule_ids;
  std::vector<std::string> rejected_rules;
  std::vector<JudgeVerdict> verdicts;
};

struct DpoTrainingRecord {
  std::string system;
  std::string user;
  std::string chosen;
  std::string rejected;
  nlohmann::ordered_json meta;

  // {"system","user","chosen","rejected","meta"}
  nlohmann::ordered_json to_json() const;
};

// user = <case_facts> block + <legal_issue> block; chosen / rejected are
// <rules> lists. Rules are ordered by id whatever the record's order. Verdict
// reasoning goes to meta only.
DpoTrainingRecord to_dpo_record(const PrefRecord& record, std::string_view system_prompt = kDefaultDpoSystemPrompt);

// One record per (chosen rule, rejected rule) pair, for trainers that want
// single-rule preferences.
std::vector<DpoTrainingRecord> to_dpo_pairs(const PrefRecord& record,
                                            std::string_view system_prompt = kDefaultDpoSystemPrompt);

enum class PrefSkip { None, NoFacts, NoChosen, NoCandidates, NoneRejected, LlmFailure };
std::string_view to_string(PrefSkip skip);

struct PrefOutcome {
  std::optional<PrefRecord> record;
  PrefSkip skip = PrefSkip::None;
  std::string reason;
  // Some candidate never got a readable verdict; it was treated as
  // Potentially.
  bool judge_failure = false;
  std::vector<std::string> problems;
};

struct PrefOptions {
  std::string model_tag = std::string(llm::kDefaultModelTag);
  int max_output = 4096;
  std::string system_prompt = std::string(kDefaultDpoSystemPrompt);
  // Re-prompts while some candidate is still without a readable verdict.
  std::vector<double> reprompt_temperatures = {0.0, 0.2};
  bool pairwise = false;
};

// Chosen = applicable_rules; candidates = candidate_rejected; one judge call
// covers all candidates; only "No" candidates become rejected. Skips when
// facts, chosen or rejected end up empty. Throws NotAnIssue.
PrefOutcome gen_pref(const IracGraph& graph, std::string_view issue_id, llm::Gateway& judge,
                     const PrefOptions& options = {});

struct PrefSummary {
  std::size_t records = 0;  // PrefRecords (issues), not JSONL lines
  std::size_t skipped = 0;
  std::size_t judge_failures = 0;
  std::size_t llm_failures = 0;
  std::size_t lines = 0;  // DPO JSONL lines written

  bool operator==(const PrefSummary&) const = default;
};

// Same contract as run_sft_generation; writes <out>/dpo.jsonl.
PrefSummary run_pref_generation(const std::vector<IracGraph>& graphs, llm::Gateway& judge,
                                const std::filesystem::path& out, const PrefOptions& options = {},
                                std::size_t jobs = 1);

}  // namespace irac
