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

#include "irac/extraction.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "irac/errors.hpp"
#include "irac/fsutil.hpp"
#include "irac/hashing.hpp"
#include "irac/parallel.hpp"
#include "irac/prompts.hpp"
#include "irac/text.hpp"

namespace irac {

namespace fs = std::filesystem;

std::string truncate_opinion(std::string_view opinion, std::size_t budget, bool* truncated) {
  if (truncated) *truncated = false;
  if (opinion.size() <= budget) return std::string(opinion);
  if (truncated) *truncated = true;
  const std::string_view head = opinion.substr(0, budget);
  std::size_t cut = head.rfind("\n\n");
  if (cut == std::string_view::npos || cut == 0) cut = head.rfind('\n');
  if (cut == std::string_view::npos || cut == 0) {
    cut = budget;
    // Back off continuation bytes so a multi-byte character is not split.
    while (cut > 0 && (static_cast<unsigned char>(opinion[cut]) & 0xC0) == 0x80) --cut;
  }
  std::string out(opinion.substr(0, cut));
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

RenderedPrompt render_kg_prompt(const CaseDocument& doc, std::size_t opinion_budget) {
  RenderedPrompt out;
  const std::string opinion = truncate_opinion(doc.opinion_text, opinion_budget, &out.truncated);
  out.text = text::render_template(prompts::kg_extraction_template(), {{"case_opinion", opinion}});
  return out;
}

std::string_view to_string(ExtractionStatus status) {
  switch (status) {
    case ExtractionStatus::Ok: return "ok";
    case ExtractionStatus::OkWithDrops: return "ok_with_drops";
    case ExtractionStatus::Quarantined: return "quarantined";
  }
  return "";
}

std::optional<ExtractionStatus> parse_extraction_status(std::string_view name) {
  for (auto s : {ExtractionStatus::Ok, ExtractionStatus::OkWithDrops, ExtractionStatus::Quarantined}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

ExtractionOutcome extract_case_graph(const CaseDocument& doc, llm::Gateway& gateway,
                                     const ExtractionOptions& options) {
  ExtractionOutcome outcome;
  outcome.case_id = doc.case_id;
  const RenderedPrompt prompt = render_kg_prompt(doc, options.opinion_budget);
  outcome.truncated_input = prompt.truncated;

  std::vector<double> temperatures = {0.0};
  temperatures.insert(temperatures.end(), options.reprompt_temperatures.begin(),
                      options.reprompt_temperatures.end());

  ParseOptions parse_options;
  parse_options.mode = ParseMode::Lenient;
  parse_options.synthesize_case_entity = true;

  for (double temperature : temperatures) {
    ++outcome.attempts;
    llm::LlmRequest request{prompt.text, options.model_tag, temperature, options.max_output};
    try {
      const llm::LlmResponse response = gateway.complete(request);
      outcome.raw_text = response.text;
    } catch (const Error& e) {
      // Gateway errors already went through the retry policy; re-prompting
      // would not help.
      outcome.errors.push_back(e.what());
      break;
    }
    try {
      ParsedGraph parsed = parse_graph_json(outcome.raw_text, doc.case_id, parse_options);
      outcome.graph = std::move(parsed.graph);
      outcome.report = std::move(parsed.report);
      outcome.synthesized_case = parsed.synthesized_case;
      outcome.status =
          outcome.report.is_valid_strict() ? ExtractionStatus::Ok : ExtractionStatus::OkWithDrops;
      outcome.errors.clear();
      break;
    } catch (const Error& e) {
      outcome.errors.push_back("attempt " + std::to_string(outcome.attempts) + " (temperature " +
                               nlohmann::json(temperature).dump() + "): " + e.what());
    }
  }
  outcome.raw_digest = sha256_hex(outcome.raw_text);
  if (!outcome.graph) outcome.status = ExtractionStatus::Quarantined;
  if (options.out_dir) persist_outcome(outcome, *options.out_dir);
  return outcome;
}

fs::path graph_path(const fs::path& dir, std::string_view case_id) {
  return dir / (std::string(case_id) + ".kg.json");
}

namespace {

nlohmann::ordered_json report_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"code", to_string(v.code)}, {"subject_id", v.subject_id}, {"message", v.message}});
  }
  j["dropped_relations"] = report.dropped_relations;
  j["dropped_entities"] = report.dropped_entities;
  return j;
}

}  // namespace

void persist_outcome(const ExtractionOutcome& outcome, const fs::path& out) {
  nlohmann::ordered_json record;
  record["case_id"] = outcome.case_id;
  record["status"] = to_string(outcome.status);
  record["attempts"] = outcome.attempts;
  record["raw_digest"] = outcome.raw_digest;
  record["truncated_input"] = outcome.truncated_input;
  record["synthesized_case"] = outcome.synthesized_case;
  record["report"] = report_json(outcome.report);
  record["errors"] = outcome.errors;

  if (outcome.graph) {
    fsutil::atomic_write(graph_path(out, outcome.case_id), serialize_graph(*outcome.graph) + "\n");
    std::error_code ec;
    fs::remove(out / "quarantine" / (outcome.case_id + ".raw.txt"), ec);
    fs::remove(out / "quarantine" / (outcome.case_id + ".errors.json"), ec);
  } else {
    fsutil::atomic_write(out / "quarantine" / (outcome.case_id + ".raw.txt"), outcome.raw_text);
    fsutil::atomic_write(out / "quarantine" / (outcome.case_id + ".errors.json"), record.dump(2) + "\n");
  }
  fsutil::atomic_write(out / "outcomes" / (outcome.case_id + ".json"), record.dump(2) + "\n");
}

ExtractionSummary run_extraction(const CaseCorpus& corpus, llm::Gateway& gateway, const fs::path& out,
                                 const ExtractionOptions& options, std::size_t jobs) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out.string() + ": " + ec.message());

  const auto cases = corpus.cases();
  std::vector<ExtractionStatus> statuses(cases.size(), ExtractionStatus::Quarantined);
  std::vector<bool> reused(cases.size(), false);
  ExtractionOptions per_case = options;
  per_case.out_dir = out;

  parallel_for(cases.size(), jobs, [&](std::size_t i) {
    const auto& doc = cases[i];
    if (fs::exists(graph_path(out, doc.case_id))) {
      ExtractionStatus status = ExtractionStatus::Ok;
      if (const auto raw = fsutil::read_file(out / "outcomes" / (doc.case_id + ".json"))) {
        const auto j = nlohmann::json::parse(*raw, nullptr, false);
        if (!j.is_discarded() && j.contains("status") && j["status"].is_string()) {
          if (auto s = parse_extraction_status(j["status"].get<std::string>()); s && *s != ExtractionStatus::Quarantined) {
            status = *s;
          }
        }
      }
      statuses[i] = status;
      reused[i] = true;
      return;
    }
    statuses[i] = extract_case_graph(doc, gateway, per_case).status;
  });

  ExtractionSummary summary;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    switch (statuses[i]) {
      case ExtractionStatus::Ok: ++summary.ok; break;
      case ExtractionStatus::OkWithDrops: ++summary.ok_with_drops; break;
      case ExtractionStatus::Quarantined: ++summary.quarantined; break;
    }
    if (reused[i]) ++summary.reused;
  }
  return summary;
}

std::vector<IracGraph> load_graphs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  constexpr std::string_view kSuffix = ".kg.json";
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.size() <= kSuffix.size() || !name.ends_with(kSuffix)) continue;
    files.emplace(name.substr(0, name.size() - kSuffix.size()), entry.path());
  }
  std::vector<IracGraph> graphs;
  for (const auto& [case_id, path] : files) {
    const auto raw = fsutil::read_file(path);
    if (!raw) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    ParsedGraph parsed = parse_graph_json(*raw, case_id, ParseOptions{ParseMode::Strict, false});
    if (!parsed.graph) {
      throw Error(ErrorCode::InvalidGraph, path.string() + ": " + parsed.report.violations.front().message);
    }
    graphs.push_back(std::move(*parsed.graph));
  }
  return graphs;
}

}  // namespace irac
