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

#include "irac/sft.hpp"

#include <algorithm>

#include "irac/dataset.hpp"
#include "irac/errors.hpp"
#include "irac/hashing.hpp"
#include "irac/parallel.hpp"
#include "irac/prompts.hpp"
#include "irac/repair.hpp"
#include "irac/text.hpp"
#include "shards.hpp"

namespace irac {

namespace fs = std::filesystem;

std::string record_id(std::string_view kind, std::string_view case_id, std::string_view issue_id) {
  std::string key(kind);
  key += '\x1f';
  key += case_id;
  key += '\x1f';
  key += issue_id;
  return sha256_hex(key).substr(0, 16);
}

namespace {

struct Element {
  std::string_view inner;
  std::size_t end = 0;  // just past the closing tag
};

// First <tag>...</tag> at or after `from`. Attributes and whitespace before
// '>' are allowed on the opening tag.
std::optional<Element> find_element(std::string_view s, std::string_view tag, std::size_t from = 0) {
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag);
  std::size_t pos = from;
  while ((pos = s.find(open, pos)) != std::string_view::npos) {
    const std::size_t after = pos + open.size();
    if (after < s.size() && (s[after] == '>' || s[after] == ' ' || s[after] == '\t' || s[after] == '\n' ||
                             s[after] == '\r')) {
      const std::size_t gt = s.find('>', after);
      if (gt == std::string_view::npos) return std::nullopt;
      const std::size_t closing = s.find(close, gt + 1);
      if (closing == std::string_view::npos) return std::nullopt;
      const std::size_t closing_gt = s.find('>', closing);
      if (closing_gt == std::string_view::npos) return std::nullopt;
      return Element{s.substr(gt + 1, closing - gt - 1), closing_gt + 1};
    }
    pos = after;
  }
  return std::nullopt;
}

std::string element_text(std::string_view scope, std::string_view tag) {
  const auto el = find_element(scope, tag);
  if (!el) throw SftXmlError(std::string(tag));
  std::string value = text::xml_unescape(text::trim(el->inner));
  if (text::trim(value).empty()) throw SftXmlError(std::string(tag));
  return value;
}

std::vector<std::string> element_list(std::string_view scope, std::string_view list_tag, std::string_view item_tag) {
  const auto list = find_element(scope, list_tag);
  if (!list) throw SftXmlError(std::string(list_tag));
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (auto item = find_element(list->inner, item_tag, pos)) {
    std::string value = text::xml_unescape(text::trim(item->inner));
    if (!text::trim(value).empty()) items.push_back(std::move(value));
    pos = item->end;
  }
  if (items.empty()) throw SftXmlError(std::string(item_tag));
  return items;
}

}  // namespace

SftPayload parse_sft_output(std::string_view xml) {
  const std::string doc = strip_code_fences(xml);
  std::string_view scope = doc;
  if (auto data = find_element(scope, "sft_data")) scope = data->inner;

  // Input and output parts are looked up inside their own wrappers when the
  // model produced them, so an <instruction> mentioning <rules> cannot
  // shadow the real element.
  std::string_view input_scope = scope;
  std::string_view output_scope = scope;
  if (auto in = find_element(scope, "sft_input")) input_scope = in->inner;
  if (auto out = find_element(scope, "sft_output")) output_scope = out->inner;

  SftPayload payload;
  payload.instruction = element_text(input_scope, "instruction");
  payload.facts = element_list(input_scope, "case_facts", "fact");
  payload.output_format = element_text(input_scope, "output_format");
  payload.legal_issue = element_text(output_scope, "legal_issue");
  payload.rules = element_list(output_scope, "rules", "rule");
  payload.explanation = element_text(output_scope, "explanation");
  return payload;
}

std::string render_sft_prompt(const FactSet& facts, const Entity& issue, const RuleSet& rules) {
  return text::render_template(prompts::sft_generation_template(),
                               {{"material_facts", text::join_lines(facts.labels())},
                                {"legal_issue", issue.label},
                                {"rules", text::join_lines(rules.labels())}});
}

nlohmann::ordered_json ChatTrainingRecord::to_json() const {
  nlohmann::ordered_json j;
  j["system"] = system;
  j["user"] = user;
  j["assistant"] = assistant;
  j["meta"] = {{"case_id", case_id}, {"issue_id", issue_id}, {"record_id", record_id}};
  return j;
}

ChatTrainingRecord to_chat_record(const SftRecord& record, std::string_view system_prompt) {
  ChatTrainingRecord chat;
  chat.system = std::string(system_prompt);

  std::string user = record.instruction;
  user += "\n\n<case_facts>\n";
  for (const auto& f : record.facts) user += "<fact>" + text::xml_escape(f) + "</fact>\n";
  user += "</case_facts>\n\n";
  user += record.output_format;
  chat.user = std::move(user);

  std::string assistant = "<legal_analysis>\n";
  assistant += "  <legal_issue>" + text::xml_escape(record.legal_issue) + "</legal_issue>\n";
  assistant += "  <rules>\n";
  for (const auto& r : record.rules) assistant += "    <rule>" + text::xml_escape(r) + "</rule>\n";
  assistant += "  </rules>\n";
  assistant += "  <explanation>" + text::xml_escape(record.explanation) + "</explanation>\n";
  assistant += "</legal_analysis>";
  chat.assistant = std::move(assistant);

  chat.case_id = record.case_id;
  chat.issue_id = record.issue_id;
  chat.record_id = record.record_id();
  return chat;
}

namespace {

std::vector<std::string> normalized_sorted(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(text::normalize(s));
  std::sort(out.begin(), out.end());
  return out;
}

void check_echo(const SftPayload& payload, const std::vector<std::string>& facts, const std::string& issue,
                const std::vector<std::string>& rules) {
  if (normalized_sorted(payload.facts) != normalized_sorted(facts)) {
    throw Error(ErrorCode::EchoMismatch, "case facts differ from the graph's facts");
  }
  if (text::normalize(payload.legal_issue) != text::normalize(issue)) {
    throw Error(ErrorCode::EchoMismatch, "legal issue differs from the graph's issue");
  }
  if (normalized_sorted(payload.rules) != normalized_sorted(rules)) {
    throw Error(ErrorCode::EchoMismatch, "rules differ from the graph's applicable rules");
  }
}

}  // namespace

SftOutcome gen_sft(const IracGraph& graph, std::string_view issue_id, llm::Gateway& gateway,
                   const SftOptions& options) {
  SftOutcome outcome;
  const FactSet facts = get_related_facts(graph, issue_id);
  if (facts.empty()) {
    outcome.skip = SftSkip::NoFacts;
    outcome.reason = "issue " + std::string(issue_id) + " has no related facts";
    return outcome;
  }
  const RuleSet rules = applicable_rules(graph, issue_id);
  if (rules.empty()) {
    outcome.skip = SftSkip::NoRules;
    outcome.reason = "issue " + std::string(issue_id) + " has no applicable rules";
    return outcome;
  }
  const Entity& issue = *graph.find_entity(issue_id);

  llm::LlmRequest request{render_sft_prompt(facts, issue, rules), options.model_tag, 0.0, options.max_output};
  llm::LlmResponse response;
  try {
    response = gateway.complete(request);
  } catch (const Error& e) {
    outcome.skip = SftSkip::LlmFailure;
    outcome.reason = e.what();
    return outcome;
  }

  const SftPayload payload = parse_sft_output(response.text);
  SftRecord record;
  record.case_id = graph.case_id();
  record.issue_id = std::string(issue_id);
  record.facts = facts.labels();
  record.legal_issue = issue.label;
  record.rules = rules.labels();
  check_echo(payload, record.facts, record.legal_issue, record.rules);
  record.explanation = payload.explanation;
  record.instruction = payload.instruction;
  record.output_format = payload.output_format;
  outcome.record = std::move(record);
  return outcome;
}

namespace {

struct CaseResult {
  std::vector<nlohmann::ordered_json> records;
  SftSummary counts;
};

nlohmann::ordered_json counts_json(const SftSummary& s) {
  return {{"records", s.records},
          {"skipped_no_facts", s.skipped_no_facts},
          {"skipped_no_rules", s.skipped_no_rules},
          {"echo_failures", s.echo_failures},
          {"malformed_outputs", s.malformed_outputs},
          {"llm_failures", s.llm_failures}};
}

SftSummary counts_from_json(const nlohmann::ordered_json& j) {
  SftSummary s;
  s.records = j.at("records").get<std::size_t>();
  s.skipped_no_facts = j.at("skipped_no_facts").get<std::size_t>();
  s.skipped_no_rules = j.at("skipped_no_rules").get<std::size_t>();
  s.echo_failures = j.at("echo_failures").get<std::size_t>();
  s.malformed_outputs = j.at("malformed_outputs").get<std::size_t>();
  s.llm_failures = j.at("llm_failures").get<std::size_t>();
  return s;
}

CaseResult generate_case(const IracGraph& graph, llm::Gateway& gateway, const SftOptions& options) {
  CaseResult result;
  for (const auto& issue : legal_issues(graph)) {
    try {
      const SftOutcome outcome = gen_sft(graph, issue.id, gateway, options);
      switch (outcome.skip) {
        case SftSkip::None:
          result.records.push_back(to_chat_record(*outcome.record, options.system_prompt).to_json());
          ++result.counts.records;
          break;
        case SftSkip::NoFacts: ++result.counts.skipped_no_facts; break;
        case SftSkip::NoRules: ++result.counts.skipped_no_rules; break;
        case SftSkip::LlmFailure: ++result.counts.llm_failures; break;
      }
    } catch (const SftXmlError&) {
      ++result.counts.malformed_outputs;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EchoMismatch) throw;
      ++result.counts.echo_failures;
    }
  }
  return result;
}

}  // namespace

SftSummary run_sft_generation(const std::vector<IracGraph>& graphs, llm::Gateway& gateway, const fs::path& out,
                              const SftOptions& options, std::size_t jobs) {
  std::vector<const IracGraph*> ordered;
  for (const auto& g : graphs) ordered.push_back(&g);
  std::sort(ordered.begin(), ordered.end(),
            [](const IracGraph* a, const IracGraph* b) { return a->case_id() < b->case_id(); });

  std::vector<CaseResult> results(ordered.size());
  parallel_for(ordered.size(), jobs, [&](std::size_t i) {
    const IracGraph& graph = *ordered[i];
    const std::string digest = sha256_hex("sft\x1f" + serialize_graph(graph) + '\x1f' + options.model_tag + '\x1f' +
                                          std::to_string(options.max_output) + '\x1f' + options.system_prompt);
    const fs::path shard = detail::shard_path(out, "sft", graph.case_id());
    if (auto cached = detail::load_shard(shard, digest)) {
      for (const auto& r : (*cached)["records"]) results[i].records.push_back(r);
      results[i].counts = counts_from_json((*cached)["counts"]);
      return;
    }
    results[i] = generate_case(graph, gateway, options);
    if (results[i].counts.llm_failures == 0) {
      nlohmann::ordered_json payload;
      payload["records"] = results[i].records;
      payload["counts"] = counts_json(results[i].counts);
      detail::save_shard(shard, digest, payload);
    }
  });

  SftSummary total;
  std::vector<nlohmann::ordered_json> merged;
  for (auto& r : results) {
    total.records += r.counts.records;
    total.skipped_no_facts += r.counts.skipped_no_facts;
    total.skipped_no_rules += r.counts.skipped_no_rules;
    total.echo_failures += r.counts.echo_failures;
    total.malformed_outputs += r.counts.malformed_outputs;
    total.llm_failures += r.counts.llm_failures;
    for (auto& rec : r.records) merged.push_back(std::move(rec));
  }
  write_jsonl(merged, out / "sft.jsonl");
  return total;
}

}  // namespace irac
