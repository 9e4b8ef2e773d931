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

#include "irac/graph_query.hpp"

#include <algorithm>

#include "irac/errors.hpp"

namespace irac {

EntitySet::EntitySet(std::vector<Entity> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end(), [](const Entity& a, const Entity& b) { return a.id < b.id; });
  members_.erase(std::unique(members_.begin(), members_.end(),
                             [](const Entity& a, const Entity& b) { return a.id == b.id; }),
                 members_.end());
}

bool EntitySet::contains(std::string_view id) const {
  const auto it = std::lower_bound(members_.begin(), members_.end(), id,
                                   [](const Entity& e, std::string_view key) { return e.id < key; });
  return it != members_.end() && it->id == id;
}

std::vector<std::string> EntitySet::ids() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& e : members_) out.push_back(e.id);
  return out;
}

std::vector<std::string> EntitySet::labels() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& e : members_) out.push_back(e.label);
  return out;
}

RuleSet set_union(const RuleSet& a, const RuleSet& b) {
  std::vector<Entity> merged(a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  return RuleSet(std::move(merged));
}

RuleSet set_difference(const RuleSet& a, const RuleSet& b) {
  std::vector<Entity> out;
  for (const auto& e : a) {
    if (!b.contains(e.id)) out.push_back(e);
  }
  return RuleSet(std::move(out));
}

namespace {

const Entity& require_kind(const IracGraph& graph, std::string_view id, EntityKind kind, ErrorCode code) {
  const Entity* e = graph.find_entity(id);
  if (!e || e->kind != kind) {
    throw Error(code, "'" + std::string(id) + "' is not a " + std::string(to_string(kind)) + " in " +
                          graph.case_id());
  }
  return *e;
}

// Sources of `kind` edges into `target` whose source entity has `source_kind`.
std::vector<Entity> sources_into(const IracGraph& graph, std::string_view target, RelationKind kind,
                                 EntityKind source_kind) {
  std::vector<Entity> out;
  for (std::size_t idx : graph.incoming(target)) {
    const Relation& r = graph.relations()[idx];
    if (r.kind != kind) continue;
    const Entity* src = graph.find_entity(r.from);
    if (src && src->kind == source_kind) out.push_back(*src);
  }
  return out;
}

}  // namespace

FactSet get_related_facts(const IracGraph& graph, std::string_view issue_id) {
  require_kind(graph, issue_id, EntityKind::LegalIssue, ErrorCode::NotAnIssue);
  std::vector<Entity> out;
  for (std::size_t idx : graph.outgoing(issue_id)) {
    const Relation& r = graph.relations()[idx];
    if (r.kind != RelationKind::ArisesFrom) continue;
    const Entity* fact = graph.find_entity(r.to);
    if (fact && fact->kind == EntityKind::MaterialFact) out.push_back(*fact);
  }
  return FactSet(std::move(out));
}

RuleSet get_rules_via_apply(const IracGraph& graph, std::string_view fact_id) {
  require_kind(graph, fact_id, EntityKind::MaterialFact, ErrorCode::NotAFact);
  return RuleSet(sources_into(graph, fact_id, RelationKind::AppliedTo, EntityKind::Rule));
}

RuleSet get_rules_via_address(const IracGraph& graph, std::string_view issue_id) {
  require_kind(graph, issue_id, EntityKind::LegalIssue, ErrorCode::NotAnIssue);
  return RuleSet(sources_into(graph, issue_id, RelationKind::Addresses, EntityKind::Rule));
}

RuleSet applicable_rules(const IracGraph& graph, std::string_view issue_id) {
  RuleSet rules;
  for (const auto& fact : get_related_facts(graph, issue_id)) {
    rules = set_union(rules, get_rules_via_apply(graph, fact.id));
  }
  return set_union(rules, get_rules_via_address(graph, issue_id));
}

RuleSet all_rules(const IracGraph& graph) {
  std::vector<Entity> out;
  for (const auto& e : graph.entities()) {
    if (e.kind == EntityKind::Rule) out.push_back(e);
  }
  return RuleSet(std::move(out));
}

RuleSet candidate_rejected(const IracGraph& graph, std::string_view issue_id) {
  return set_difference(all_rules(graph), applicable_rules(graph, issue_id));
}

std::vector<Entity> legal_issues(const IracGraph& graph) {
  std::vector<Entity> out;
  for (const auto& e : graph.entities()) {
    if (e.kind == EntityKind::LegalIssue) out.push_back(e);
  }
  return EntitySet(std::move(out)).members();
}

}  // namespace irac
