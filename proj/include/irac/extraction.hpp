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

#include "irac/corpus.hpp"
#include "irac/kg.hpp"
#include "irac/llm.hpp"

namespace irac {

inline constexpr std::size_t kDefaultOpinionBudget = 200'000;

struct RenderedPrompt {
  std::string text;
  bool truncated = false;
};

// Keeps the head of `opinion` within `budget` bytes, cutting at the last
// paragraph break ("\n\n") that fits, else the last line break, else the last
// UTF-8 character boundary. Returns the input unchanged when it fits.
std::string truncate_opinion(std::string_view opinion, std::size_t budget, bool* truncated = nullptr);

// The extraction template with {case_opinion} substituted (after truncation).
RenderedPrompt render_kg_prompt(const CaseDocument& doc, std::size_t opinion_budget = kDefaultOpinionBudget);

enum class ExtractionStatus { Ok, OkWithDrops, Quarantined };
std::string_view to_string(ExtractionStatus status);
std::optional<ExtractionStatus> parse_extraction_status(std::string_view name);

struct ExtractionOutcome {
  std::string case_id;
  ExtractionStatus status = ExtractionStatus::Quarantined;
  std::optional<IracGraph> graph;  // absent iff quarantined
  ValidationReport report;
  std::string raw_text;    // last model output seen
  std::string raw_digest;  // sha256 of raw_text
  std::vector<std::string> errors;
  int attempts = 0;
  bool truncated_input = false;
  bool synthesized_case = false;
};

struct ExtractionOptions {
  std::string model_tag = std::string(llm::kDefaultModelTag);
  int max_output = 8192;
  std::size_t opinion_budget = kDefaultOpinionBudget;
  // Temperatures for the re-prompts after an unparseable first answer.
  std::vector<double> reprompt_temperatures = {0.0, 0.2};
  // When set, outcomes are written here (see persist_outcome).
  std::optional<std::filesystem::path> out_dir;
};

// prompt -> completion -> repair/parse (lenient, Case synthesis on) ->
// outcome. Gateway failures and unparseable output become quarantined
// outcomes instead of exceptions; only out-directory I/O throws.
ExtractionOutcome extract_case_graph(const CaseDocument& doc, llm::Gateway& gateway,
                                     const ExtractionOptions& options = {});

// Layout under `out`:
//   <case_id>.kg.json                      graph (ok / ok_with_drops)
//   outcomes/<case_id>.json                status, violations, drops, digest
//   quarantine/<case_id>.raw.txt           raw model text (quarantined)
//   quarantine/<case_id>.errors.json       errors per attempt (quarantined)
void persist_outcome(const ExtractionOutcome& outcome, const std::filesystem::path& out);

struct ExtractionSummary {
  std::size_t ok = 0;
  std::size_t ok_with_drops = 0;
  std::size_t quarantined = 0;
  std::size_t reused = 0;  // already persisted; no gateway call made
};

// One outcome per case, `jobs` cases in flight. Cases whose graph is already
// in `out` are counted from their stored outcome and not re-extracted.
ExtractionSummary run_extraction(const CaseCorpus& corpus, llm::Gateway& gateway, const std::filesystem::path& out,
                                 const ExtractionOptions& options = {}, std::size_t jobs = 1);

// Strict load of every <case_id>.kg.json in `dir`, ordered by case_id.
// Throws InvalidGraph / UnparseableDocument / IoError.
std::vector<IracGraph> load_graphs(const std::filesystem::path& dir);

std::filesystem::path graph_path(const std::filesystem::path& dir, std::string_view case_id);

}  // namespace irac
