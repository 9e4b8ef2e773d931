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

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace irac_test {

using namespace irac;

fs::path source_dir() { return fs::path(IRAC_SOURCE_DIR); }
fs::path fixtures_dir() { return source_dir() / "tests" / "fixtures"; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "irac-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ScopedCwd::ScopedCwd(const fs::path& dir) : previous_(fs::current_path()) { fs::current_path(dir); }

ScopedCwd::~ScopedCwd() {
  std::error_code ec;
  fs::current_path(previous_, ec);
}

namespace {

const std::vector<std::pair<std::string, std::string>>& fixture_a_labels() {
  static const std::vector<std::pair<std::string, std::string>> labels = {
      {"F1", "The defendant store left a spilled liquid on the floor for two hours without warning signs."},
      {"F2", "The plaintiff slipped on the liquid and fractured a wrist."},
      {"I1", "Whether the store breached its duty of care to the plaintiff as a business invitee."},
      {"R1", "A business owner must exercise reasonable care to keep premises safe for invitees."},
      {"R2", "Breach of duty is established when conduct falls below the standard of a reasonable person."},
      {"R3", "Assumption of risk defense"},
      {"C1", "The store breached its duty of care and is liable for the plaintiff's injuries."},
      {"P1", "Smith v. Jones Grocery (1998)"},
  };
  return labels;
}

}  // namespace

std::string fixture_a_label(std::string_view id) {
  for (const auto& [k, v] : fixture_a_labels()) {
    if (k == id) return v;
  }
  throw std::out_of_range(std::string(id));
}

IracGraph fixture_a() {
  const std::vector<EntityKind> kinds = {EntityKind::MaterialFact, EntityKind::MaterialFact, EntityKind::LegalIssue,
                                         EntityKind::Rule,         EntityKind::Rule,         EntityKind::Rule,
                                         EntityKind::Conclusion,   EntityKind::CitedCase};
  std::vector<Entity> entities;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    entities.push_back({fixture_a_labels()[i].first, kinds[i], fixture_a_labels()[i].second});
  }
  std::vector<Relation> relations = {
      {"REL1", RelationKind::ArisesFrom, "I1", "F1"}, {"REL2", RelationKind::ArisesFrom, "I1", "F2"},
      {"REL3", RelationKind::AppliedTo, "R1", "F1"},  {"REL4", RelationKind::Addresses, "R2", "I1"},
      {"REL5", RelationKind::DerivesFrom, "R1", "P1"}, {"REL6", RelationKind::LeadsTo, "R1", "C1"},
  };
  return IracGraph("FIXTURE-A", std::move(entities), std::move(relations));
}

llm::LlmResponse ScriptedBackend::complete(const llm::LlmRequest& request) {
  calls_.fetch_add(1);
  const int now = in_flight_.fetch_add(1) + 1;
  int peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
  }
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { n.fetch_sub(1); }
  } leave{in_flight_};
  return script_(request);
}

std::vector<llm::LlmRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

llm::LlmResponse text_response(std::string text) {
  return llm::make_response(std::move(text), llm::FinishState::Complete, llm::Provenance::Live);
}

llm::GatewayOptions fast_gateway_options(std::size_t max_in_flight) {
  llm::GatewayOptions o;
  o.max_in_flight = max_in_flight;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

// ---------------------------------------------------------------------------

const std::vector<WireRule>& wire_endpoint_table() {
  static const std::vector<WireRule> table = {
      {"CITES", {"Case"}, {"CitedCase"}},
      {"REFERENCES", {"Case"}, {"Statute", "Regulation"}},
      {"ARISES_FROM", {"LegalIssue"}, {"MaterialFact"}},
      {"ADDRESSES", {"Rule"}, {"LegalIssue"}},
      {"APPLIED_TO", {"Rule"}, {"MaterialFact"}},
      {"DERIVES_FROM", {"Rule"}, {"CitedCase", "Statute", "Regulation"}},
      {"LEADS_TO", {"Rule"}, {"Conclusion"}},
  };
  return table;
}

const std::vector<std::string>& wire_entity_kinds() {
  static const std::vector<std::string> kinds = {"Case",       "CitedCase", "MaterialFact", "LegalIssue",
                                                 "Conclusion", "Rule",      "Statute",      "Regulation"};
  return kinds;
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

const std::vector<std::string>& label_fragments() {
  static const std::vector<std::string> f = {
      "plain words",
      "a \"quoted\" phrase",
      "back\\slash and \\n literal",
      "first line\nsecond line",
      "caf\xc3\xa9 \xe4\xb8\xad\xe6\x96\x87 \xe2\x9c\x93",
      "<tag attr=\"x\"> & </tag>",
      "tab\tinside",
      "{braces} and [brackets]",
      "'single' quotes",
  };
  return f;
}

}  // namespace

IracGraph random_graph(std::mt19937_64& rng, std::size_t max_entities) {
  const std::size_t n = pick(rng, max_entities + 1);
  static const std::vector<std::string> prefixes = {"E", "n", "Z", "x-", "R", "F"};
  // Weight the kinds the traversals care about.
  static const std::vector<std::string> weighted = {"MaterialFact", "MaterialFact", "LegalIssue", "LegalIssue",
                                                    "Rule",         "Rule",         "Rule",       "Case",
                                                    "CitedCase",    "Conclusion",   "Statute",    "Regulation"};

  std::vector<Entity> entities;
  std::set<std::string> used;
  while (entities.size() < n) {
    std::string id = prefixes[pick(rng, prefixes.size())] + std::to_string(pick(rng, 1000));
    if (!used.insert(id).second) continue;
    const std::string& kind = weighted[pick(rng, weighted.size())];
    std::string label = label_fragments()[pick(rng, label_fragments().size())] + " #" + id;
    entities.push_back({id, *parse_entity_kind(kind), label});
  }

  std::vector<Relation> relations;
  const std::size_t attempts = n == 0 ? 0 : pick(rng, 3 * n + 1);
  for (std::size_t a = 0; a < attempts; ++a) {
    const WireRule& rule = wire_endpoint_table()[pick(rng, wire_endpoint_table().size())];
    std::vector<const Entity*> from, to;
    for (const auto& e : entities) {
      const std::string k(to_string(e.kind));
      if (std::find(rule.sources.begin(), rule.sources.end(), k) != rule.sources.end()) from.push_back(&e);
      if (std::find(rule.targets.begin(), rule.targets.end(), k) != rule.targets.end()) to.push_back(&e);
    }
    if (from.empty() || to.empty()) continue;
    const std::string id = "rel" + std::to_string(relations.size());
    relations.push_back({id, *parse_relation_kind(rule.relation), from[pick(rng, from.size())]->id,
                         to[pick(rng, to.size())]->id});
  }
  return IracGraph("RAND-" + std::to_string(rng() % 100000), std::move(entities), std::move(relations));
}

// ---------------------------------------------------------------------------

IdSet ids_of(const EntitySet& set) {
  IdSet out;
  for (const auto& e : set) out.insert(e.id);
  return out;
}

std::string kind_name(const IracGraph& g, const std::string& id) {
  for (const auto& e : g.entities()) {
    if (e.id == id) return std::string(to_string(e.kind));
  }
  return "";
}

namespace {

IdSet scan(const IracGraph& g, std::string_view rel, const std::string* from, const std::string* to, bool want_from,
           std::string_view want_kind) {
  IdSet out;
  for (const auto& r : g.relations()) {
    if (to_string(r.kind) != rel) continue;
    if (from && r.from != *from) continue;
    if (to && r.to != *to) continue;
    const std::string& id = want_from ? r.from : r.to;
    if (kind_name(g, id) == want_kind) out.insert(id);
  }
  return out;
}

}  // namespace

IdSet oracle_facts(const IracGraph& g, const std::string& issue) {
  return scan(g, "ARISES_FROM", &issue, nullptr, false, "MaterialFact");
}

IdSet oracle_rules_via_apply(const IracGraph& g, const std::string& fact) {
  return scan(g, "APPLIED_TO", nullptr, &fact, true, "Rule");
}

IdSet oracle_rules_via_address(const IracGraph& g, const std::string& issue) {
  return scan(g, "ADDRESSES", nullptr, &issue, true, "Rule");
}

IdSet oracle_applicable(const IracGraph& g, const std::string& issue) {
  IdSet out = oracle_rules_via_address(g, issue);
  for (const auto& f : oracle_facts(g, issue)) {
    const IdSet via = oracle_rules_via_apply(g, f);
    out.insert(via.begin(), via.end());
  }
  return out;
}

IdSet oracle_all_rules(const IracGraph& g) {
  IdSet out;
  for (const auto& e : g.entities()) {
    if (to_string(e.kind) == "Rule") out.insert(e.id);
  }
  return out;
}

IdSet oracle_candidates(const IracGraph& g, const std::string& issue) {
  const IdSet chosen = oracle_applicable(g, issue);
  IdSet out;
  for (const auto& r : oracle_all_rules(g)) {
    if (!chosen.count(r)) out.insert(r);
  }
  return out;
}

std::vector<std::string> ids_of_kind(const IracGraph& g, std::string_view kind) {
  std::vector<std::string> out;
  for (const auto& e : g.entities()) {
    if (to_string(e.kind) == kind) out.push_back(e.id);
  }
  return out;
}

}  // namespace irac_test
