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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check collects its own failure messages so a FAIL line says
// what went wrong.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "irac/cli.hpp"
#include "irac/dataset.hpp"
#include "irac/extraction.hpp"
#include "irac/graph_query.hpp"
#include "irac/kg.hpp"
#include "irac/pref.hpp"
#include "irac/review.hpp"
#include "irac/sft.hpp"
#include "support.hpp"

using namespace irac;
using irac_test::IdSet;
using irac_test::ids_of;
using irac_test::read_text;
using irac_test::TempDir;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

class Failures {
 public:
  void add(std::string msg) {
    if (list_.size() < 5) list_.push_back(std::move(msg));
    ++count_;
  }
  template <typename A, typename B>
  void expect_eq(const A& a, const B& b, const std::string& what) {
    if (!(a == b)) add(what);
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) add(what);
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(count_) + " problem(s)";
    for (const auto& m : list_) s += "; " + m;
    return s;
  }

 private:
  std::vector<std::string> list_;
  std::size_t count_ = 0;
};

std::string completion(const std::string& name) {
  return read_text(irac_test::fixtures_dir() / "completions" / name);
}

// ---- 1 & 2 ---------------------------------------------------------------

constexpr int kRandomGraphs = 1000;

void traversal_oracle(Failures& f, std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260101);
  std::size_t issues = 0;
  for (int trial = 0; trial < kRandomGraphs; ++trial) {
    const IracGraph g = irac_test::random_graph(rng, 50);
    const std::string tag = g.case_id() + ": ";
    f.expect_eq(ids_of(all_rules(g)), irac_test::oracle_all_rules(g), tag + "all_rules");
    for (const auto& fact : irac_test::ids_of_kind(g, "MaterialFact")) {
      f.expect_eq(ids_of(get_rules_via_apply(g, fact)), irac_test::oracle_rules_via_apply(g, fact),
                  tag + "get_rules_via_apply " + fact);
    }
    for (const auto& i : irac_test::ids_of_kind(g, "LegalIssue")) {
      ++issues;
      f.expect_eq(ids_of(get_related_facts(g, i)), irac_test::oracle_facts(g, i), tag + "get_related_facts " + i);
      f.expect_eq(ids_of(get_rules_via_address(g, i)), irac_test::oracle_rules_via_address(g, i),
                  tag + "get_rules_via_address " + i);
      f.expect_eq(ids_of(applicable_rules(g, i)), irac_test::oracle_applicable(g, i), tag + "applicable_rules " + i);
      f.expect_eq(ids_of(candidate_rejected(g, i)), irac_test::oracle_candidates(g, i),
                  tag + "candidate_rejected " + i);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d graphs, %zu issues, %.2f s", kRandomGraphs, issues, secs);
  detail = buf;
}

void set_laws(Failures& f, std::string& detail) {
  std::mt19937_64 rng(20260101);
  std::size_t issues = 0;
  for (int trial = 0; trial < kRandomGraphs; ++trial) {
    const IracGraph g = irac_test::random_graph(rng, 50);
    const IdSet all = ids_of(all_rules(g));
    for (const auto& issue : legal_issues(g)) {
      ++issues;
      const IdSet chosen = ids_of(applicable_rules(g, issue.id));
      const IdSet cand = ids_of(candidate_rejected(g, issue.id));
      IdSet both, either = chosen;
      for (const auto& id : cand) {
        if (chosen.count(id)) both.insert(id);
        either.insert(id);
      }
      f.expect(both.empty(), g.case_id() + " " + issue.id + ": chosen and candidates overlap");
      f.expect_eq(either, all, g.case_id() + " " + issue.id + ": chosen + candidates != all_rules");
    }
  }
  detail = std::to_string(issues) + " issues";
}

// ---- 3 -------------------------------------------------------------------

enum class Scripted { Yes, No, Potentially, Garbage };

// A judge answering per candidate label; garbage entries carry an
// unreadable applicability, and the whole reply can be garbage too.
std::shared_ptr<irac_test::ScriptedBackend> judge_for(std::vector<std::pair<std::string, Scripted>> answers,
                                                      bool whole_reply_garbage) {
  return std::make_shared<irac_test::ScriptedBackend>([answers, whole_reply_garbage](const llm::LlmRequest&) {
    if (whole_reply_garbage) return irac_test::text_response("I am not able to assess these rules.");
    json rules = json::array();
    for (const auto& [label, a] : answers) {
      const char* word = a == Scripted::Yes ? "Yes" : a == Scripted::No ? "No" : a == Scripted::Potentially ? "Potentially" : "Unclear";
      rules.push_back({{"Rule", label}, {"Applicability", word}, {"Reasoning", "scripted"}});
    }
    return irac_test::text_response("```json\n" + json{{"Rules", rules}}.dump(2) + "\n```");
  });
}

void judge_gate(Failures& f, std::string& detail) {
  std::mt19937_64 rng(33);
  std::size_t records = 0, judged = 0;
  std::array<std::size_t, 4> seen{};
  for (int trial = 0; trial < 300; ++trial) {
    const IracGraph g = irac_test::random_graph(rng, 30);
    for (const auto& issue : legal_issues(g)) {
      const auto facts = get_related_facts(g, issue.id);
      const auto chosen = applicable_rules(g, issue.id);
      const auto cand = candidate_rejected(g, issue.id);
      if (facts.empty() || chosen.empty() || cand.empty()) continue;
      const bool whole_garbage = rng() % 10 == 0;
      std::vector<std::pair<std::string, Scripted>> answers;
      std::vector<std::string> expected_no;
      for (const auto& r : cand) {
        const auto a = static_cast<Scripted>(rng() % 4);
        answers.emplace_back(r.label, a);
        if (!whole_garbage) {
          ++seen[static_cast<std::size_t>(a)];
          if (a == Scripted::No) expected_no.push_back(r.id);
        }
      }
      std::sort(expected_no.begin(), expected_no.end());
      llm::Gateway gw(judge_for(answers, whole_garbage), irac_test::fast_gateway_options());
      const PrefOutcome out = gen_pref(g, issue.id, gw);
      ++judged;
      const std::string tag = g.case_id() + " " + issue.id + ": ";
      if (expected_no.empty()) {
        f.expect(!out.record, tag + "record emitted without a No verdict");
        continue;
      }
      if (!out.record) {
        f.add(tag + "no record although some candidate was judged No");
        continue;
      }
      ++records;
      f.expect_eq(out.record->rejected_rule_ids, expected_no, tag + "rejected != No candidates");
      f.expect_eq(IdSet(out.record->chosen_rule_ids.begin(), out.record->chosen_rule_ids.end()), ids_of(chosen),
                  tag + "chosen != applicable_rules");
    }
  }

  // The recorded fixture completions: FIXTURE-B mixes Potentially, Yes and a
  // lowercase "no".
  const IracGraph b = *parse_graph_json(completion("FIXTURE-B.kg.txt"), "FIXTURE-B").graph;
  const std::map<std::string, std::vector<std::string>> expected = {{"I1", {"R3"}}, {"I2", {"R3"}}};
  for (const auto& [issue, rejected] : expected) {
    auto backend = std::make_shared<irac_test::ScriptedBackend>([issue = issue](const llm::LlmRequest&) {
      return irac_test::text_response(completion("FIXTURE-B." + issue + ".judge.txt"));
    });
    llm::Gateway gw(backend, irac_test::fast_gateway_options());
    const auto out = gen_pref(b, issue, gw);
    if (!out.record) {
      f.add("FIXTURE-B " + issue + ": no record");
    } else {
      f.expect_eq(out.record->rejected_rule_ids, rejected, "FIXTURE-B " + issue + ": rejected");
    }
  }
  detail = std::to_string(judged) + " judged issues, " + std::to_string(records) + " records; verdicts Y/N/P/garbage " +
           std::to_string(seen[0]) + "/" + std::to_string(seen[1]) + "/" + std::to_string(seen[2]) + "/" +
           std::to_string(seen[3]);
  f.expect(seen[0] && seen[1] && seen[2] && seen[3], "some verdict kind never exercised");
}

// ---- 4 -------------------------------------------------------------------

// A document with one entity of every kind and one valid relation of every
// kind, built from the independent wire table.
json full_wire_doc() {
  json doc;
  doc["vertices_"] = json::array();
  for (const auto& k : irac_test::wire_entity_kinds()) doc["vertices_"].push_back({{"id_", "E_" + k}, {"type_", k}, {"label_", "a " + k}});
  doc["relations_"] = json::array();
  for (const auto& r : irac_test::wire_endpoint_table()) {
    doc["relations_"].push_back(
        {{"id_", "REL_" + r.relation}, {"type_", r.relation}, {"from_", "E_" + r.sources[0]}, {"to_", "E_" + r.targets[0]}});
  }
  return doc;
}

std::size_t violations_of(const std::string& text) {
  ParseOptions strict;
  strict.mode = ParseMode::Strict;
  try {
    return parse_graph_json(text, "MUT", strict).report.violations.size();
  } catch (const Error&) {
    return 0;
  }
}

void schema_enforcement(Failures& f, std::string& detail) {
  std::vector<std::pair<std::string, std::string>> clean;  // name, doc
  std::vector<std::pair<std::string, std::string>> mutants;

  const json base = full_wire_doc();
  clean.emplace_back("all-kinds", base.dump());
  clean.emplace_back("FIXTURE-A", serialize_graph(irac_test::fixture_a()));

  const auto& kinds = irac_test::wire_entity_kinds();
  for (std::size_t ri = 0; ri < irac_test::wire_endpoint_table().size(); ++ri) {
    const auto& rule = irac_test::wire_endpoint_table()[ri];
    for (const auto& k : kinds) {
      if (std::find(rule.sources.begin(), rule.sources.end(), k) == rule.sources.end()) {
        json m = base;
        m["relations_"][ri]["from_"] = "E_" + k;
        mutants.emplace_back(rule.relation + " from " + k, m.dump());
      }
      if (std::find(rule.targets.begin(), rule.targets.end(), k) == rule.targets.end()) {
        json m = base;
        m["relations_"][ri]["to_"] = "E_" + k;
        mutants.emplace_back(rule.relation + " to " + k, m.dump());
      }
    }
  }
  {
    json m = base;
    m["vertices_"][1]["id_"] = m["vertices_"][0]["id_"];
    mutants.emplace_back("duplicate entity id", m.dump());
    m = base;
    m["relations_"][1]["id_"] = m["relations_"][0]["id_"];
    mutants.emplace_back("duplicate relation id", m.dump());
    m = base;
    m["relations_"][2]["from_"] = "NOPE";
    mutants.emplace_back("dangling from", m.dump());
    m = base;
    m["relations_"][3]["to_"] = "NOPE";
    mutants.emplace_back("dangling to", m.dump());
    m = base;
    m["vertices_"][4]["type_"] = "Holding";
    mutants.emplace_back("unknown entity kind", m.dump());
    m = base;
    m["relations_"][5]["type_"] = "OVERRULES";
    mutants.emplace_back("unknown relation kind", m.dump());
  }

  // Random valid graphs as further clean inputs, each with one mutation of a
  // random relation's endpoint to a kind its rule forbids.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const IracGraph g = irac_test::random_graph(rng, 30);
    const std::string text = serialize_graph(g);
    clean.emplace_back(g.case_id(), text);
    json doc = json::parse(text);
    if (doc["relations_"].empty()) continue;
    const std::size_t ri = rng() % doc["relations_"].size();
    const std::string rel = doc["relations_"][ri]["type_"];
    const auto rule = std::find_if(irac_test::wire_endpoint_table().begin(), irac_test::wire_endpoint_table().end(),
                                   [&](const irac_test::WireRule& w) { return w.relation == rel; });
    std::vector<std::string> bad_sources;
    for (const auto& e : doc["vertices_"]) {
      const std::string k = e["type_"];
      if (std::find(rule->sources.begin(), rule->sources.end(), k) == rule->sources.end()) bad_sources.push_back(e["id_"]);
    }
    if (bad_sources.empty()) continue;
    doc["relations_"][ri]["from_"] = bad_sources[rng() % bad_sources.size()];
    mutants.emplace_back(g.case_id() + " " + rel + " source", doc.dump());
  }

  std::size_t caught = 0;
  for (const auto& [name, text] : mutants) {
    if (violations_of(text) > 0) {
      ++caught;
    } else {
      f.add("mutant not caught: " + name);
    }
  }
  for (const auto& [name, text] : clean) f.expect(violations_of(text) == 0, "clean doc flagged: " + name);
  detail = std::to_string(caught) + "/" + std::to_string(mutants.size()) + " mutants caught, " +
           std::to_string(clean.size()) + " clean docs";
}

// ---- 5 -------------------------------------------------------------------

void format_fidelity(Failures& f, std::string& detail) {
  std::size_t goldens = 0;
  std::map<std::string, IracGraph> graphs;
  for (const std::string id : {"FIXTURE-A", "FIXTURE-B"}) {
    const std::string opinion = read_text(irac_test::fixtures_dir() / "corpus" / (id + ".txt"));
    f.expect_eq(render_kg_prompt(CaseDocument{id, "unknown", opinion, {}}).text,
                read_text(irac_test::golden_dir() / (id + ".kg_prompt.txt")), id + " kg prompt");
    ++goldens;
    graphs.emplace(id, *parse_graph_json(completion(id + ".kg.txt"), id).graph);
  }
  for (const auto& [case_id, issue] : std::vector<std::pair<std::string, std::string>>{
           {"FIXTURE-A", "I1"}, {"FIXTURE-B", "I1"}, {"FIXTURE-B", "I2"}}) {
    const IracGraph& g = graphs.at(case_id);
    const auto facts = get_related_facts(g, issue);
    const Entity& e = *g.find_entity(issue);
    const std::string stem = case_id + "." + issue;
    f.expect_eq(render_sft_prompt(facts, e, applicable_rules(g, issue)),
                read_text(irac_test::golden_dir() / (stem + ".sft_prompt.txt")), stem + " sft prompt");
    f.expect_eq(render_judge_prompt(facts, e, applicable_rules(g, issue), candidate_rejected(g, issue)),
                read_text(irac_test::golden_dir() / (stem + ".judge_prompt.txt")), stem + " judge prompt");
    goldens += 2;
  }

  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const IracGraph g = irac_test::random_graph(rng, 50);
    const std::string text = serialize_graph(g);
    ParseOptions strict;
    strict.mode = ParseMode::Strict;
    const auto parsed = parse_graph_json(text, g.case_id(), strict);
    if (!parsed.graph || !(*parsed.graph == g)) {
      f.add("round trip changed " + g.case_id());
      continue;
    }
    f.expect_eq(serialize_graph(*parsed.graph), text, "re-serialization differs for " + g.case_id());
  }

  // SFT XML: every required tag removed in turn must be rejected by name.
  const std::string sft_ok = completion("FIXTURE-A.I1.sft.txt");
  std::size_t sft_cases = 0;
  try {
    parse_sft_output(sft_ok);
  } catch (const std::exception& e) {
    f.add(std::string("valid SFT completion rejected: ") + e.what());
  }
  for (const std::string tag : {"instruction", "case_facts", "output_format", "legal_issue", "rules", "explanation"}) {
    std::string bad = sft_ok;
    const auto open = bad.find("<" + tag + ">");
    const auto close = bad.find("</" + tag + ">");
    if (open == std::string::npos || close == std::string::npos) {
      f.add("fixture lacks <" + tag + ">");
      continue;
    }
    bad.erase(open, close + tag.size() + 3 - open);
    ++sft_cases;
    try {
      parse_sft_output(bad);
      f.add("SFT parser accepted a document without <" + tag + ">");
    } catch (const SftXmlError& e) {
      f.expect_eq(e.tag(), tag, "SFT parser named <" + e.tag() + "> instead of <" + tag + ">");
    }
  }
  for (const std::string bad : {"", "Sorry, I cannot help.", "<sft_data><sft_input>", "{\"json\": true}"}) {
    ++sft_cases;
    try {
      parse_sft_output(bad);
      f.add("SFT parser accepted: " + bad);
    } catch (const SftXmlError&) {
    }
  }

  // Judge JSON.
  const RuleSet cand({{"R3", EntityKind::Rule, "Assumption of risk defense"}});
  std::size_t judge_cases = 0;
  f.expect(parse_judge_output(completion("FIXTURE-A.I1.judge.txt"), cand).size() == 1, "valid judge reply rejected");
  for (const std::string bad : {
           "", "No.", "{\"Rules\": [", "{\"rules\": 3}", "{\"Verdicts\": []}", "[]",
           R"({"Rules":[{"Rule":"Some other rule","Applicability":"No"}]})",
           R"({"Rules":[{"Rule":"Assumption of risk defense","Applicability":"Probably"}]})",
           R"({"Rules":[{"Rule":"Assumption of risk defense"}]})",
           R"({"Rules":[{"Applicability":"No"}]})",
           R"({"Rules":["Assumption of risk defense"]})"}) {
    ++judge_cases;
    try {
      parse_judge_output(bad, cand);
      f.add("judge parser accepted: " + bad);
    } catch (const Error& e) {
      f.expect(e.code() == ErrorCode::JudgeParseFailure, "judge parser threw the wrong code for: " + bad);
    }
  }
  detail = std::to_string(goldens) + " goldens, 1000 round trips, " + std::to_string(sft_cases) + " SFT and " +
           std::to_string(judge_cases) + " judge malformed inputs";
}

// ---- 6 -------------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* err_out = nullptr) {
  args.insert(args.begin(), "irac");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

// Runs the whole pipeline inside `dir` with relative paths; returns the
// bytes of every artefact that has to be reproducible.
std::map<std::string, std::string> pipeline(const fs::path& dir, Failures& f) {
  irac_test::ScopedCwd cwd(dir);
  fs::copy(irac_test::fixtures_dir() / "corpus", "corpus", fs::copy_options::recursive);
  const std::string replay = (irac_test::fixtures_dir() / "replay").string();
  const std::vector<std::vector<std::string>> steps = {
      {"ingest", "--root", "corpus", "--out", "index"},
      {"sample", "--corpus", "index/corpus.json", "--per-jurisdiction", "2", "--seed", "7", "--out", "sample"},
      {"extract", "--corpus", "sample/corpus.json", "--out", "kg", "--gateway", "replay", "--fixtures", replay,
       "--jobs", "2"},
      {"validate", "--kg-dir", "kg", "--out", "validate.json"},
      {"gen-sft", "--kg-dir", "kg", "--out", "sft", "--gateway", "replay", "--fixtures", replay, "--jobs", "2"},
      {"gen-pref", "--kg-dir", "kg", "--out", "dpo", "--gateway", "replay", "--fixtures", replay, "--jobs", "2"},
      {"split", "--input", "sft/sft.jsonl", "--out", "split", "--ratio", "10:1", "--seed", "7"},
  };
  for (const auto& step : steps) {
    std::string err;
    const int code = cli(step, &err);
    if (code != 0) f.add(step[0] + " exited " + std::to_string(code) + ": " + err.substr(0, 200));
  }
  std::map<std::string, std::string> artefacts;
  for (const std::string p : {"sft/sft.jsonl", "dpo/dpo.jsonl", "index/run-manifest.json", "sample/run-manifest.json",
                              "kg/run-manifest.json", "validate.json.run-manifest.json", "sft/run-manifest.json",
                              "dpo/run-manifest.json", "split/run-manifest.json"}) {
    if (!fs::exists(p)) {
      f.add("missing " + p);
      continue;
    }
    artefacts[p] = read_text(p);
  }
  return artefacts;
}

void determinism(Failures& f, std::string& detail) {
  TempDir a, b;
  const auto first = pipeline(a.path(), f);
  const auto second = pipeline(b.path(), f);
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    f.expect(it != second.end() && it->second == bytes, name + " differs between runs");
  }
  std::size_t sft = 0, dpo = 0;
  if (first.count("sft/sft.jsonl")) sft = std::count(first.at("sft/sft.jsonl").begin(), first.at("sft/sft.jsonl").end(), '\n');
  if (first.count("dpo/dpo.jsonl")) dpo = std::count(first.at("dpo/dpo.jsonl").begin(), first.at("dpo/dpo.jsonl").end(), '\n');
  f.expect(sft == 3, "expected 3 SFT lines, got " + std::to_string(sft));
  f.expect(dpo == 3, "expected 3 DPO lines, got " + std::to_string(dpo));
  detail = std::to_string(first.size()) + " artefacts compared; " + std::to_string(sft) + " SFT and " +
           std::to_string(dpo) + " DPO lines";
}

// ---- 7 -------------------------------------------------------------------

std::vector<Record> synthetic(std::size_t cases) {
  std::vector<Record> v;
  for (std::size_t c = 0; c < cases; ++c) {
    for (std::size_t k = 0; k <= c % 3; ++k) {
      v.push_back(Record{{"user", "u"}, {"meta", {{"case_id", "case-" + std::to_string(c)}, {"issue_id", "I" + std::to_string(k)}}}});
    }
  }
  return v;
}

void split_protocol(Failures& f, std::string& detail) {
  for (const auto& [cases, want] : std::vector<std::pair<std::size_t, std::size_t>>{{11, 1}, {110, 10}}) {
    const auto records = synthetic(cases);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto r = split_train_val(records, {10, 1, seed});
      const std::string tag = std::to_string(cases) + " cases seed " + std::to_string(seed) + ": ";
      f.expect_eq(r.val_cases.size(), want, tag + "validation case count");
      f.expect_eq(r.train_cases.size(), cases - want, tag + "train case count");
      f.expect_eq(r.train.size() + r.val.size(), records.size(), tag + "records lost");
      std::set<std::string> train_ids, val_ids;
      for (const auto& x : r.train) train_ids.insert(record_case_id(x));
      for (const auto& x : r.val) val_ids.insert(record_case_id(x));
      for (const auto& id : val_ids) f.expect(!train_ids.count(id), tag + id + " on both sides");
      f.expect_eq(val_ids.size(), want, tag + "validation records span the wrong cases");
    }
  }
  detail = "11 -> 1 and 110 -> 10 validation cases, 200 seeds each";
}

// ---- 8 -------------------------------------------------------------------

void review_counts(Failures& f, std::string& detail) {
  using namespace review;
  // 15 record grades.
  {
    const IracGraph g("c", {{"F1", EntityKind::MaterialFact, "f"}}, {});
    std::vector<RecordForReview> recs;
    for (int i = 0; i < 15; ++i) recs.push_back({"c", "rec" + std::to_string(i), "text"});
    auto batch = create_review_batch("B", {g}, {1, {ItemKind::SftRecord}, 0}, recs);
    for (int i = 0; i < 15; ++i) {
      submit_label(batch, {{"c", ItemKind::SftRecord, "rec" + std::to_string(i)},
                           i < 11 ? RecordGrade::Correct : RecordGrade::CorrectMinor, "sme", ""});
    }
    f.expect_eq(aggregate_record_quality(batch), (RecordQuality{11, 4, 0}), "record quality != {11,4,0}");
  }
  // 11 Pass / 1 Fail relations.
  std::string relation_row;
  {
    std::vector<Entity> e = {{"R1", EntityKind::Rule, "r"}, {"I1", EntityKind::LegalIssue, "i"}};
    std::vector<Relation> r;
    for (int i = 0; i < 12; ++i) r.push_back({"A" + std::to_string(i), RelationKind::Addresses, "R1", "I1"});
    auto batch = create_review_batch("B", {IracGraph("c", e, r)}, {});
    for (int i = 0; i < 12; ++i) {
      submit_label(batch, {{"c", ItemKind::Relation, "A" + std::to_string(i)},
                           i < 11 ? RelationVerdict::Pass : RelationVerdict::Fail, "sme", ""});
    }
    const auto rel = aggregate_quality(batch).to_json()["relations"];
    relation_row = rel["pass_pct"].dump() + "%/" + rel["fail_pct"].dump() + "%";
    f.expect(rel["pass_pct"] == 92 && rel["fail_pct"] == 8, "relation row rendered " + relation_row);
  }
  // Poor endpoint next to a manual Pass.
  {
    auto batch = create_review_batch("B", {irac_test::fixture_a()}, {});
    const IracGraph g = irac_test::fixture_a();
    for (const auto& e : g.entities()) {
      submit_label(batch, {{"FIXTURE-A", ItemKind::Entity, e.id}, e.id == "R1" ? EntityGrade::Poor : EntityGrade::Good, "sme", ""});
    }
    for (const auto& r : g.relations()) {
      submit_label(batch, {{"FIXTURE-A", ItemKind::Relation, r.id}, RelationVerdict::Pass, "sme", ""});
    }
    derive_relation_verdicts(batch);
    for (const auto& r : g.relations()) {
      const bool touches = r.from == "R1" || r.to == "R1";
      const auto v = effective_relation_verdict(batch, {"FIXTURE-A", ItemKind::Relation, r.id});
      f.expect(v == (touches ? RelationVerdict::Fail : RelationVerdict::Pass), r.id + " has the wrong effective verdict");
    }
  }
  detail = "records {11,4,0}, relations " + relation_row + ", derived Fail over manual Pass";
}

// ---- 9 -------------------------------------------------------------------

void end_to_end(Failures& f, std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  llm::Gateway gw(std::make_shared<llm::ReplayBackend>(irac_test::fixtures_dir() / "replay"),
                  irac_test::fast_gateway_options());
  const CaseDocument doc{"FIXTURE-A", "unknown", read_text(irac_test::fixtures_dir() / "corpus/FIXTURE-A.txt"), {}};
  const ExtractionOutcome ex = extract_case_graph(doc, gw);
  f.expect(ex.status == ExtractionStatus::Ok, "extraction status is not Ok");
  if (!ex.graph) {
    f.add("no graph extracted");
    return;
  }
  const IracGraph& g = *ex.graph;
  f.expect_eq(g.entities().size(), 8u, "entity count");
  f.expect_eq(g.relations().size(), 6u, "relation count");
  f.expect(validate_graph(g).is_valid_strict(), "graph not strictly valid");
  f.expect(g == irac_test::fixture_a(), "graph differs from the hand-built FIXTURE-A");

  const auto label = irac_test::fixture_a_label;
  const SftOutcome sft = gen_sft(g, "I1", gw);
  if (!sft.record) {
    f.add("no SftRecord");
  } else {
    const SftRecord& r = *sft.record;
    f.expect_eq(r.case_id, std::string("FIXTURE-A"), "sft case_id");
    f.expect_eq(r.issue_id, std::string("I1"), "sft issue_id");
    f.expect_eq(r.facts, std::vector<std::string>{label("F1"), label("F2")}, "sft facts");
    f.expect_eq(r.legal_issue, label("I1"), "sft legal_issue");
    f.expect_eq(r.rules, std::vector<std::string>{label("R1"), label("R2")}, "sft rules");
    f.expect(!r.explanation.empty() && !r.instruction.empty() && !r.output_format.empty(), "sft text fields empty");
  }

  const PrefOutcome pref = gen_pref(g, "I1", gw);
  if (!pref.record) {
    f.add("no PrefRecord");
  } else {
    const PrefRecord& p = *pref.record;
    f.expect_eq(p.case_id, std::string("FIXTURE-A"), "pref case_id");
    f.expect_eq(p.issue_id, std::string("I1"), "pref issue_id");
    f.expect_eq(p.facts, std::vector<std::string>{label("F1"), label("F2")}, "pref facts");
    f.expect_eq(p.legal_issue, label("I1"), "pref legal_issue");
    f.expect_eq(p.chosen_rule_ids, std::vector<std::string>{"R1", "R2"}, "pref chosen ids");
    f.expect_eq(p.chosen_rules, std::vector<std::string>{label("R1"), label("R2")}, "pref chosen labels");
    f.expect_eq(p.rejected_rule_ids, std::vector<std::string>{"R3"}, "pref rejected ids");
    f.expect_eq(p.rejected_rules, std::vector<std::string>{label("R3")}, "pref rejected labels");
    f.expect(p.verdicts.size() == 1 && p.verdicts[0].applicability == Applicability::No, "pref verdicts");
    f.expect(!pref.judge_failure, "judge failure flagged");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.expect(secs < 5.0, "took " + std::to_string(secs) + " s");
  char buf[80];
  std::snprintf(buf, sizeof buf, "8 entities, 6 relations, rules {R1,R2}, rejected {R3}, %.3f s", secs);
  detail = buf;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Failures&, std::string&)>>> criteria = {
      {"AC1 traversal oracle equivalence", traversal_oracle},
      {"AC2 chosen/candidate set laws", set_laws},
      {"AC3 judge gate keeps exactly the No candidates", judge_gate},
      {"AC4 schema enforcement on mutated wire docs", schema_enforcement},
      {"AC5 format fidelity", format_fidelity},
      {"AC6 pipeline determinism", determinism},
      {"AC7 case-level 10:1 split", split_protocol},
      {"AC8 review count reproductions", review_counts},
      {"AC9 FIXTURE-A end to end", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Failures f;
    std::string detail;
    try {
      check(f, detail);
    } catch (const std::exception& e) {
      f.add(std::string("threw: ") + e.what());
    }
    if (f.ok()) {
      std::cout << "[PASS] " << name << " (" << detail << ")\n";
    } else {
      ++failed;
      std::cout << "[FAIL] " << name << ": " << f.summary() << "\n";
    }
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
