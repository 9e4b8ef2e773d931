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

#include "irac/pref.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <variant>

#include "irac/dataset.hpp"
#include "irac/errors.hpp"
#include "irac/hashing.hpp"
#include "irac/parallel.hpp"
#include "irac/prompts.hpp"
#include "irac/repair.hpp"
#include "irac/sft.hpp"
#include "irac/text.hpp"
#include "shards.hpp"

namespace irac {

namespace fs = std::filesystem;

std::string_view to_string(Applicability a) {
  switch (a) {
    case Applicability::Yes: return "Yes";
    case Applicability::No: return "No";
    case Applicability::Potentially: return "Potentially";
  }
  return "Potentially";
}

std::optional<Applicability> parse_applicability(std::string_view s) {
  std::string v(text::trim(s));
  if (!v.empty() && v.back() == '.') v.pop_back();
  for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "yes") return Applicability::Yes;
  if (v == "no") return Applicability::No;
  if (v == "potentially") return Applicability::Potentially;
  return std::nullopt;
}

std::string_view to_string(PrefSkip skip) {
  switch (skip) {
    case PrefSkip::None: return "none";
    case PrefSkip::NoFacts: return "no_facts";
    case PrefSkip::NoChosen: return "no_chosen";
    case PrefSkip::NoCandidates: return "no_candidates";
    case PrefSkip::NoneRejected: return "none_rejected";
    case PrefSkip::LlmFailure: return "llm_failure";
  }
  return "none";
}

std::string render_judge_prompt(const FactSet& facts, const Entity& issue, const RuleSet& chosen,
                                const RuleSet& candidates) {
  return text::render_template(prompts::rule_judge_template(),
                               {{"case_facts", text::join_lines(facts.labels())},
                                {"legal_issue", issue.label},
                                {"chosen_rules", text::join_lines(chosen.labels())},
                                {"rejected_rules", text::join_lines(candidates.labels())}});
}

namespace {

const nlohmann::json* find_key(const nlohmann::json& obj, std::string_view key) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) return &*it;
  // Models sometimes change the case of attribute names.
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    if (k.size() == key.size() &&
        std::equal(k.begin(), k.end(), key.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return &*it;
    }
  }
  return nullptr;
}

const nlohmann::json& rules_array(std::string_view text) {
  thread_local nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(repair_json(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::JudgeParseFailure, std::string("bad JSON: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::JudgeParseFailure, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::JudgeParseFailure, "judge output is not an object");
  const nlohmann::json* rules = find_key(doc, "Rules");
  if (!rules || !rules->is_array()) throw Error(ErrorCode::JudgeParseFailure, "missing \"Rules\" array");
  return *rules;
}

struct Entry {
  std::vector<const Entity*> matches;
  std::string rule_text;
  Applicability applicability = Applicability::Potentially;
  std::string reasoning;
};

// Reads one "Rules" entry; the message of the returned error explains what
// was wrong with it.
std::variant<Entry, std::string> read_entry(const nlohmann::json& item, const RuleSet& candidates) {
  if (!item.is_object()) return std::string("entry is not an object");
  const nlohmann::json* rule = find_key(item, "Rule");
  if (!rule || !rule->is_string()) return std::string("entry without a \"Rule\" string");
  const nlohmann::json* app = find_key(item, "Applicability");
  const nlohmann::json* why = find_key(item, "Reasoning");

  Entry entry;
  entry.rule_text = rule->get<std::string>();
  const std::string key = text::normalize(entry.rule_text);
  for (const auto& c : candidates) {
    if (text::normalize(c.label) == key) entry.matches.push_back(&c);
  }
  if (entry.matches.empty()) return "rule \"" + entry.rule_text + "\" matches no candidate";
  if (!app || !app->is_string()) return "rule \"" + entry.rule_text + "\" has no applicability";
  const auto parsed = parse_applicability(app->get<std::string>());
  if (!parsed) return "rule \"" + entry.rule_text + "\" has unknown applicability \"" + app->get<std::string>() + "\"";
  entry.applicability = *parsed;
  if (why && why->is_string()) entry.reasoning = why->get<std::string>();
  return entry;
}

}  // namespace

std::vector<JudgeVerdict> parse_judge_output(std::string_view text, const RuleSet& candidates) {
  const nlohmann::json& rules = rules_array(text);
  std::vector<JudgeVerdict> verdicts;
  for (const auto& item : rules) {
    auto read = read_entry(item, candidates);
    if (auto* problem = std::get_if<std::string>(&read)) throw Error(ErrorCode::JudgeParseFailure, *problem);
    const Entry& entry = std::get<Entry>(read);
    for (const Entity* c : entry.matches) verdicts.push_back({c->id, c->label, entry.applicability, entry.reasoning});
  }
  return verdicts;
}

JudgeParse parse_judge_entries(std::string_view text, const RuleSet& candidates) {
  const nlohmann::json& rules = rules_array(text);
  JudgeParse result;
  std::set<std::string> failed;
  for (const auto& item : rules) {
    auto read = read_entry(item, candidates);
    if (auto* problem = std::get_if<std::string>(&read)) {
      result.problems.push_back(*problem);
      // A malformed entry still names its rule sometimes; that candidate
      // stays unresolved rather than silently missing.
      if (item.is_object()) {
        if (const nlohmann::json* rule = find_key(item, "Rule"); rule && rule->is_string()) {
          const std::string key = text::normalize(rule->get<std::string>());
          for (const auto& c : candidates) {
            if (text::normalize(c.label) == key) failed.insert(c.id);
          }
        }
      }
      continue;
    }
    const Entry& entry = std::get<Entry>(read);
    for (const Entity* c : entry.matches) {
      result.verdicts.push_back({c->id, c->label, entry.applicability, entry.reasoning});
    }
  }
  result.failed_ids.assign(failed.begin(), failed.end());
  return result;
}

namespace {

std::string rules_block(const std::vector<std::pair<std::string, std::string>>& rules) {
  std::string out = "<rules>\n";
  for (const auto& [id, label] : rules) out += "<rule>" + text::xml_escape(label) + "</rule>\n";
  out += "</rules>";
  return out;
}

std::vector<std::pair<std::string, std::string>> by_id(const std::vector<std::string>& ids,
                                                       const std::vector<std::string>& labels) {
  std::vector<std::pair<std::string, std::string>> rules;
  for (std::size_t i = 0; i < labels.size(); ++i) rules.emplace_back(i < ids.size() ? ids[i] : std::string(), labels[i]);
  std::sort(rules.begin(), rules.end());
  return rules;
}

std::string user_text(const PrefRecord& record) {
  std::string user = "<case_facts>\n";
  for (const auto& f : record.facts) user += "<fact>" + text::xml_escape(f) + "</fact>\n";
  user += "</case_facts>\n";
  user += "<legal_issue>" + text::xml_escape(record.legal_issue) + "</legal_issue>";
  return user;
}

nlohmann::ordered_json verdicts_json(const std::vector<JudgeVerdict>& verdicts) {
  std::vector<JudgeVerdict> sorted = verdicts;
  std::sort(sorted.begin(), sorted.end(),
            [](const JudgeVerdict& a, const JudgeVerdict& b) { return a.rule_id < b.rule_id; });
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& v : sorted) {
    out.push_back({{"rule_id", v.rule_id},
                   {"rule", v.rule_label},
                   {"applicability", to_string(v.applicability)},
                   {"reasoning", v.reasoning}});
  }
  return out;
}

}  // namespace

nlohmann::ordered_json DpoTrainingRecord::to_json() const {
  nlohmann::ordered_json j;
  j["system"] = system;
  j["user"] = user;
  j["chosen"] = chosen;
  j["rejected"] = rejected;
  j["meta"] = meta;
  return j;
}

DpoTrainingRecord to_dpo_record(const PrefRecord& record, std::string_view system_prompt) {
  const auto chosen = by_id(record.chosen_rule_ids, record.chosen_rules);
  const auto rejected = by_id(record.rejected_rule_ids, record.rejected_rules);

  DpoTrainingRecord dpo;
  dpo.system = std::string(system_prompt);
  dpo.user = user_text(record);
  dpo.chosen = rules_block(chosen);
  dpo.rejected = rules_block(rejected);
  dpo.meta["case_id"] = record.case_id;
  dpo.meta["issue_id"] = record.issue_id;
  dpo.meta["record_id"] = record_id("dpo", record.case_id, record.issue_id);
  dpo.meta["verdicts"] = verdicts_json(record.verdicts);
  return dpo;
}

std::vector<DpoTrainingRecord> to_dpo_pairs(const PrefRecord& record, std::string_view system_prompt) {
  const auto chosen = by_id(record.chosen_rule_ids, record.chosen_rules);
  const auto rejected = by_id(record.rejected_rule_ids, record.rejected_rules);
  const std::string user = user_text(record);

  std::vector<DpoTrainingRecord> pairs;
  for (const auto& c : chosen) {
    for (const auto& r : rejected) {
      DpoTrainingRecord dpo;
      dpo.system = std::string(system_prompt);
      dpo.user = user;
      dpo.chosen = rules_block({c});
      dpo.rejected = rules_block({r});
      dpo.meta["case_id"] = record.case_id;
      dpo.meta["issue_id"] = record.issue_id;
      dpo.meta["record_id"] = record_id("dpo-pair", record.case_id, record.issue_id + '\x1f' + c.first + '\x1f' + r.first);
      dpo.meta["chosen_rule_id"] = c.first;
      dpo.meta["rejected_rule_id"] = r.first;
      nlohmann::ordered_json verdict = nlohmann::ordered_json::array();
      for (const auto& v : record.verdicts) {
        if (v.rule_id == r.first) {
          verdict.push_back({{"rule_id", v.rule_id},
                             {"rule", v.rule_label},
                             {"applicability", to_string(v.applicability)},
                             {"reasoning", v.reasoning}});
        }
      }
      dpo.meta["verdicts"] = std::move(verdict);
      pairs.push_back(std::move(dpo));
    }
  }
  return pairs;
}

PrefOutcome gen_pref(const IracGraph& graph, std::string_view issue_id, llm::Gateway& judge,
                     const PrefOptions& options) {
  PrefOutcome outcome;
  const FactSet facts = get_related_facts(graph, issue_id);
  const RuleSet chosen = applicable_rules(graph, issue_id);
  const RuleSet candidates = candidate_rejected(graph, issue_id);
  const std::string issue_name(issue_id);
  if (facts.empty()) {
    outcome.skip = PrefSkip::NoFacts;
    outcome.reason = "issue " + issue_name + " has no related facts";
    return outcome;
  }
  if (chosen.empty()) {
    outcome.skip = PrefSkip::NoChosen;
    outcome.reason = "issue " + issue_name + " has no applicable rules";
    return outcome;
  }
  if (candidates.empty()) {
    outcome.skip = PrefSkip::NoCandidates;
    outcome.reason = "issue " + issue_name + " has no candidate rules to judge";
    return outcome;
  }
  const Entity& issue = *graph.find_entity(issue_id);
  const std::string prompt = render_judge_prompt(facts, issue, chosen, candidates);

  // Per candidate: the verdicts read so far. A candidate is resolved once it
  // has at least one well-formed verdict.
  std::map<std::string, std::vector<JudgeVerdict>> resolved;
  auto unresolved = [&] {
    return std::any_of(candidates.begin(), candidates.end(),
                       [&](const Entity& c) { return !resolved.count(c.id); });
  };

  std::vector<double> temperatures = {0.0};
  temperatures.insert(temperatures.end(), options.reprompt_temperatures.begin(), options.reprompt_temperatures.end());
  for (double temperature : temperatures) {
    llm::LlmRequest request{prompt, options.model_tag, temperature, options.max_output};
    std::string reply;
    try {
      reply = judge.complete(request).text;
    } catch (const Error& e) {
      if (resolved.empty()) {
        outcome.skip = PrefSkip::LlmFailure;
        outcome.reason = e.what();
        return outcome;
      }
      outcome.problems.push_back(e.what());
      break;
    }
    try {
      JudgeParse parse = parse_judge_entries(reply, candidates);
      for (auto& p : parse.problems) outcome.problems.push_back(std::move(p));
      // Only fill in what is still missing, so a later attempt cannot flip a
      // verdict read earlier.
      std::map<std::string, std::vector<JudgeVerdict>> fresh;
      for (auto& v : parse.verdicts) {
        if (!resolved.count(v.rule_id)) fresh[v.rule_id].push_back(std::move(v));
      }
      for (auto& [id, vs] : fresh) resolved[id] = std::move(vs);
    } catch (const Error& e) {
      outcome.problems.push_back(e.what());
    }
    if (!unresolved()) break;
  }

  PrefRecord record;
  record.case_id = graph.case_id();
  record.issue_id = issue_name;
  record.facts = facts.labels();
  record.legal_issue = issue.label;
  record.chosen_rule_ids = chosen.ids();
  record.chosen_rules = chosen.labels();
  for (const auto& c : candidates) {
    auto it = resolved.find(c.id);
    if (it == resolved.end()) {
      outcome.judge_failure = true;
      record.verdicts.push_back({c.id, c.label, Applicability::Potentially, "no readable judge verdict"});
      continue;
    }
    // Conflicting entries for one rule: anything other than a unanimous No
    // keeps it out of the rejected set.
    const bool all_no = std::all_of(it->second.begin(), it->second.end(),
                                    [](const JudgeVerdict& v) { return v.applicability == Applicability::No; });
    JudgeVerdict verdict = it->second.front();
    if (!all_no) {
      for (const auto& v : it->second) {
        if (v.applicability != Applicability::No) {
          verdict = v;
          break;
        }
      }
    }
    record.verdicts.push_back(verdict);
    if (all_no) {
      record.rejected_rule_ids.push_back(c.id);
      record.rejected_rules.push_back(c.label);
    }
  }
  if (record.rejected_rules.empty()) {
    outcome.skip = PrefSkip::NoneRejected;
    outcome.reason = "issue " + issue_name + ": no candidate was judged non-applicable";
    return outcome;
  }
  outcome.record = std::move(record);
  return outcome;
}

namespace {

struct CaseResult {
  std::vector<nlohmann::ordered_json> lines;
  PrefSummary counts;
};

nlohmann::ordered_json counts_json(const PrefSummary& s) {
  return {{"records", s.records},
          {"skipped", s.skipped},
          {"judge_failures", s.judge_failures},
          {"llm_failures", s.llm_failures},
          {"lines", s.lines}};
}

PrefSummary counts_from_json(const nlohmann::ordered_json& j) {
  PrefSummary s;
  s.records = j.at("records").get<std::size_t>();
  s.skipped = j.at("skipped").get<std::size_t>();
  s.judge_failures = j.at("judge_failures").get<std::size_t>();
  s.llm_failures = j.at("llm_failures").get<std::size_t>();
  s.lines = j.at("lines").get<std::size_t>();
  return s;
}

CaseResult generate_case(const IracGraph& graph, llm::Gateway& judge, const PrefOptions& options) {
  CaseResult result;
  for (const auto& issue : legal_issues(graph)) {
    const PrefOutcome outcome = gen_pref(graph, issue.id, judge, options);
    if (outcome.judge_failure) ++result.counts.judge_failures;
    if (outcome.skip == PrefSkip::LlmFailure) ++result.counts.llm_failures;
    if (!outcome.record) {
      ++result.counts.skipped;
      continue;
    }
    ++result.counts.records;
    if (options.pairwise) {
      for (const auto& dpo : to_dpo_pairs(*outcome.record, options.system_prompt)) {
        result.lines.push_back(dpo.to_json());
      }
    } else {
      result.lines.push_back(to_dpo_record(*outcome.record, options.system_prompt).to_json());
    }
  }
  result.counts.lines = result.lines.size();
  return result;
}

}  // namespace

PrefSummary run_pref_generation(const std::vector<IracGraph>& graphs, llm::Gateway& judge, const fs::path& out,
                                const PrefOptions& options, std::size_t jobs) {
  std::vector<const IracGraph*> ordered;
  for (const auto& g : graphs) ordered.push_back(&g);
  std::sort(ordered.begin(), ordered.end(),
            [](const IracGraph* a, const IracGraph* b) { return a->case_id() < b->case_id(); });

  std::string temps;
  for (double t : options.reprompt_temperatures) temps += nlohmann::json(t).dump() + ',';

  std::vector<CaseResult> results(ordered.size());
  parallel_for(ordered.size(), jobs, [&](std::size_t i) {
    const IracGraph& graph = *ordered[i];
    const std::string digest =
        sha256_hex("dpo\x1f" + serialize_graph(graph) + '\x1f' + options.model_tag + '\x1f' +
                   std::to_string(options.max_output) + '\x1f' + options.system_prompt + '\x1f' + temps + '\x1f' +
                   (options.pairwise ? "pairwise" : "issue"));
    const fs::path shard = detail::shard_path(out, "dpo", graph.case_id());
    if (auto cached = detail::load_shard(shard, digest)) {
      for (const auto& r : (*cached)["lines"]) results[i].lines.push_back(r);
      results[i].counts = counts_from_json((*cached)["counts"]);
      return;
    }
    results[i] = generate_case(graph, judge, options);
    // Transient gateway failures are retried on the next run.
    if (results[i].counts.llm_failures == 0) {
      nlohmann::ordered_json payload;
      payload["lines"] = results[i].lines;
      payload["counts"] = counts_json(results[i].counts);
      detail::save_shard(shard, digest, payload);
    }
  });

  PrefSummary total;
  std::vector<nlohmann::ordered_json> merged;
  for (auto& r : results) {
    total.records += r.counts.records;
    total.skipped += r.counts.skipped;
    total.judge_failures += r.counts.judge_failures;
    total.llm_failures += r.counts.llm_failures;
    total.lines += r.counts.lines;
    for (auto& line : r.lines) merged.push_back(std::move(line));
  }
  write_jsonl(merged, out / "dpo.jsonl");
  return total;
}

}  // namespace irac
