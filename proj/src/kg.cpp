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

#include "irac/kg.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "irac/errors.hpp"
#include "irac/repair.hpp"
#include "irac/text.hpp"

namespace irac {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Case: return "Case";
    case EntityKind::CitedCase: return "CitedCase";
    case EntityKind::MaterialFact: return "MaterialFact";
    case EntityKind::LegalIssue: return "LegalIssue";
    case EntityKind::Conclusion: return "Conclusion";
    case EntityKind::Rule: return "Rule";
    case EntityKind::Statute: return "Statute";
    case EntityKind::Regulation: return "Regulation";
  }
  return "";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Cites: return "CITES";
    case RelationKind::References: return "REFERENCES";
    case RelationKind::ArisesFrom: return "ARISES_FROM";
    case RelationKind::Addresses: return "ADDRESSES";
    case RelationKind::AppliedTo: return "APPLIED_TO";
    case RelationKind::DerivesFrom: return "DERIVES_FROM";
    case RelationKind::LeadsTo: return "LEADS_TO";
  }
  return "";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  for (auto kind : kAllEntityKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view name) {
  for (auto kind : kAllRelationKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

constexpr std::array kCaseOnly = {EntityKind::Case};
constexpr std::array kCitedCaseOnly = {EntityKind::CitedCase};
constexpr std::array kStatuteOrRegulation = {EntityKind::Statute, EntityKind::Regulation};
constexpr std::array kIssueOnly = {EntityKind::LegalIssue};
constexpr std::array kFactOnly = {EntityKind::MaterialFact};
constexpr std::array kRuleOnly = {EntityKind::Rule};
constexpr std::array kAuthority = {EntityKind::CitedCase, EntityKind::Statute, EntityKind::Regulation};
constexpr std::array kConclusionOnly = {EntityKind::Conclusion};

}  // namespace

bool EndpointRule::allows(EntityKind from, EntityKind to) const {
  return std::find(sources.begin(), sources.end(), from) != sources.end() &&
         std::find(targets.begin(), targets.end(), to) != targets.end();
}

EndpointRule relation_endpoint_rule(RelationKind kind) {
  switch (kind) {
    case RelationKind::Cites: return {kCaseOnly, kCitedCaseOnly};
    case RelationKind::References: return {kCaseOnly, kStatuteOrRegulation};
    case RelationKind::ArisesFrom: return {kIssueOnly, kFactOnly};
    case RelationKind::Addresses: return {kRuleOnly, kIssueOnly};
    case RelationKind::AppliedTo: return {kRuleOnly, kFactOnly};
    case RelationKind::DerivesFrom: return {kRuleOnly, kAuthority};
    case RelationKind::LeadsTo: return {kRuleOnly, kConclusionOnly};
  }
  return {};
}

// ---------------------------------------------------------------------------

IracGraph::IracGraph(std::string case_id, std::vector<Entity> entities, std::vector<Relation> relations)
    : case_id_(std::move(case_id)), entities_(std::move(entities)), relations_(std::move(relations)) {
  entity_index_.reserve(entities_.size());
  for (std::size_t i = 0; i < entities_.size(); ++i) entity_index_.emplace(entities_[i].id, i);
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    outgoing_[relations_[i].from].push_back(i);
    incoming_[relations_[i].to].push_back(i);
  }
}

const Entity* IracGraph::find_entity(std::string_view id) const {
  const auto it = entity_index_.find(std::string(id));
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

std::span<const std::size_t> IracGraph::incoming(std::string_view id) const {
  const auto it = incoming_.find(std::string(id));
  if (it == incoming_.end()) return {};
  return it->second;
}

std::span<const std::size_t> IracGraph::outgoing(std::string_view id) const {
  const auto it = outgoing_.find(std::string(id));
  if (it == outgoing_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::DuplicateId: return "DUPLICATE_ID";
    case ViolationCode::DanglingEndpoint: return "DANGLING_ENDPOINT";
    case ViolationCode::EndpointKind: return "ENDPOINT_KIND";
    case ViolationCode::UnknownKind: return "UNKNOWN_KIND";
    case ViolationCode::MissingField: return "MISSING_FIELD";
    case ViolationCode::EmptyLabel: return "EMPTY_LABEL";
  }
  return "";
}

std::size_t ValidationReport::count(ViolationCode code) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; }));
}

namespace {

// Checks one relation against a resolved entity table. Returns the first
// problem found, if any.
std::optional<Violation> check_relation(const Relation& r, const Entity* from, const Entity* to) {
  if (!from || !to) {
    const std::string& missing = !from ? r.from : r.to;
    return Violation{ViolationCode::DanglingEndpoint, r.id,
                     std::string(to_string(r.kind)) + " " + r.id + " points at unknown entity '" + missing + "'"};
  }
  if (!relation_endpoint_rule(r.kind).allows(from->kind, to->kind)) {
    return Violation{ViolationCode::EndpointKind, r.id,
                     std::string(to_string(r.kind)) + " " + r.id + " cannot connect " +
                         std::string(to_string(from->kind)) + " -> " + std::string(to_string(to->kind))};
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_graph(const IracGraph& graph) {
  ValidationReport report;
  std::unordered_set<std::string> seen;
  for (const auto& e : graph.entities()) {
    if (e.id.empty()) {
      report.violations.push_back({ViolationCode::MissingField, e.id, "entity with empty id"});
      continue;
    }
    if (!seen.insert(e.id).second) {
      report.violations.push_back({ViolationCode::DuplicateId, e.id, "entity id '" + e.id + "' repeated"});
    }
    if (text::trim(e.label).empty()) {
      report.violations.push_back({ViolationCode::EmptyLabel, e.id, "entity '" + e.id + "' has an empty label"});
    }
  }
  std::unordered_set<std::string> seen_relations;
  for (const auto& r : graph.relations()) {
    if (r.id.empty()) {
      report.violations.push_back({ViolationCode::MissingField, r.id, "relation with empty id"});
    } else if (!seen_relations.insert(r.id).second) {
      report.violations.push_back({ViolationCode::DuplicateId, r.id, "relation id '" + r.id + "' repeated"});
    }
    if (auto v = check_relation(r, graph.find_entity(r.from), graph.find_entity(r.to))) {
      report.violations.push_back(std::move(*v));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

nlohmann::json parse_object(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    std::string candidate;
    try {
      candidate = repair_json(text);
    } catch (const Error&) {
      throw Error(ErrorCode::UnparseableDocument, "no JSON object in document");
    }
    doc = json::parse(candidate, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorCode::UnparseableDocument, "repaired text is still not a JSON object");
    }
  }
  return doc;
}

const std::string* string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return nullptr;
  return it->get_ptr<const std::string*>();
}

const json& array_field(const json& doc, const char* key, ValidationReport& report) {
  static const json kEmpty = json::array();
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    report.violations.push_back({ViolationCode::MissingField, key, std::string("document has no \"") + key + "\" array"});
    return kEmpty;
  }
  return *it;
}

struct WireRelation {
  std::string subject;  // id_ or a positional name when id_ is missing
  std::optional<Relation> relation;
};

}  // namespace

ParsedGraph parse_graph_json(std::string_view text, std::string case_id, const ParseOptions& options) {
  const json doc = parse_object(text);
  ParsedGraph out;
  ValidationReport& report = out.report;

  // Entities.
  std::vector<Entity> entities;
  std::unordered_set<std::string> entity_ids;
  const json& vertices = array_field(doc, "vertices_", report);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const json& v = vertices[i];
    const std::string position = "vertices_[" + std::to_string(i) + "]";
    if (!v.is_object()) {
      report.violations.push_back({ViolationCode::MissingField, position, "vertex is not an object"});
      report.dropped_entities.push_back(position);
      continue;
    }
    const std::string* id = string_field(v, "id_");
    const std::string* type = string_field(v, "type_");
    const std::string* label = string_field(v, "label_");
    const std::string subject = (id && !id->empty()) ? *id : position;
    auto drop = [&](ViolationCode code, std::string message) {
      report.violations.push_back({code, subject, std::move(message)});
      report.dropped_entities.push_back(subject);
    };
    if (!id || id->empty()) {
      drop(ViolationCode::MissingField, position + " has no id_");
      continue;
    }
    if (!type) {
      drop(ViolationCode::MissingField, "entity '" + *id + "' has no type_");
      continue;
    }
    const auto kind = parse_entity_kind(*type);
    if (!kind) {
      drop(ViolationCode::UnknownKind, "entity '" + *id + "' has unknown type '" + *type + "'");
      continue;
    }
    if (!label) {
      drop(ViolationCode::MissingField, "entity '" + *id + "' has no label_");
      continue;
    }
    if (text::trim(*label).empty()) {
      drop(ViolationCode::EmptyLabel, "entity '" + *id + "' has an empty label");
      continue;
    }
    if (!entity_ids.insert(*id).second) {
      drop(ViolationCode::DuplicateId, "entity id '" + *id + "' repeated");
      continue;
    }
    entities.push_back({*id, *kind, *label});
  }

  // Relations, first pass: shape only.
  std::vector<WireRelation> wire_relations;
  const json& relations = array_field(doc, "relations_", report);
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const json& r = relations[i];
    const std::string position = "relations_[" + std::to_string(i) + "]";
    WireRelation wr;
    if (!r.is_object()) {
      wr.subject = position;
      report.violations.push_back({ViolationCode::MissingField, position, "relation is not an object"});
      wire_relations.push_back(std::move(wr));
      continue;
    }
    const std::string* id = string_field(r, "id_");
    const std::string* type = string_field(r, "type_");
    const std::string* from = string_field(r, "from_");
    const std::string* to = string_field(r, "to_");
    wr.subject = (id && !id->empty()) ? *id : position;
    if (!id || id->empty() || !type || !from || !to) {
      const char* field = (!id || id->empty()) ? "id_" : !type ? "type_" : !from ? "from_" : "to_";
      report.violations.push_back(
          {ViolationCode::MissingField, wr.subject, "relation " + wr.subject + " has no " + field});
    } else if (const auto kind = parse_relation_kind(*type); !kind) {
      report.violations.push_back(
          {ViolationCode::UnknownKind, wr.subject, "relation " + wr.subject + " has unknown type '" + *type + "'"});
    } else {
      wr.relation = Relation{*id, *kind, *from, *to};
    }
    wire_relations.push_back(std::move(wr));
  }

  if (options.synthesize_case_entity) {
    const bool has_case = std::any_of(entities.begin(), entities.end(),
                                      [](const Entity& e) { return e.kind == EntityKind::Case; });
    const bool needs_case = std::any_of(wire_relations.begin(), wire_relations.end(), [](const WireRelation& w) {
      return w.relation &&
             (w.relation->kind == RelationKind::Cites || w.relation->kind == RelationKind::References);
    });
    if (!has_case && needs_case) {
      std::string case_entity_id = "CASE";
      for (int n = 2; entity_ids.count(case_entity_id); ++n) case_entity_id = "CASE_" + std::to_string(n);
      entity_ids.insert(case_entity_id);
      entities.push_back({case_entity_id, EntityKind::Case, case_id});
      for (auto& w : wire_relations) {
        if (!w.relation) continue;
        auto& r = *w.relation;
        if ((r.kind == RelationKind::Cites || r.kind == RelationKind::References) && !entity_ids.count(r.from)) {
          r.from = case_entity_id;
        }
      }
      out.synthesized_case = true;
    }
  }

  // Relations, second pass: ids and endpoints against the surviving entities.
  std::unordered_map<std::string, const Entity*> by_id;
  for (const auto& e : entities) by_id.emplace(e.id, &e);
  auto lookup = [&](const std::string& id) -> const Entity* {
    const auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };
  std::vector<Relation> kept;
  std::unordered_set<std::string> relation_ids;
  for (auto& w : wire_relations) {
    if (!w.relation) {
      report.dropped_relations.push_back(w.subject);
      continue;
    }
    if (!relation_ids.insert(w.relation->id).second) {
      report.violations.push_back(
          {ViolationCode::DuplicateId, w.subject, "relation id '" + w.relation->id + "' repeated"});
      report.dropped_relations.push_back(w.subject);
      continue;
    }
    if (auto v = check_relation(*w.relation, lookup(w.relation->from), lookup(w.relation->to))) {
      report.violations.push_back(std::move(*v));
      report.dropped_relations.push_back(w.subject);
      continue;
    }
    kept.push_back(std::move(*w.relation));
  }

  if (options.mode == ParseMode::Lenient || report.is_valid_strict()) {
    out.graph.emplace(std::move(case_id), std::move(entities), std::move(kept));
  }
  return out;
}

std::string serialize_graph(const IracGraph& graph) {
  const auto report = validate_graph(graph);
  if (!report.is_valid_strict()) {
    throw Error(ErrorCode::InvalidGraph, graph.case_id() + ": " + report.violations.front().message);
  }
  nlohmann::ordered_json doc;
  doc["vertices_"] = nlohmann::ordered_json::array();
  doc["relations_"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.entities()) {
    nlohmann::ordered_json v;
    v["id_"] = e.id;
    v["type_"] = to_string(e.kind);
    v["label_"] = e.label;
    doc["vertices_"].push_back(std::move(v));
  }
  for (const auto& r : graph.relations()) {
    nlohmann::ordered_json v;
    v["id_"] = r.id;
    v["type_"] = to_string(r.kind);
    v["from_"] = r.from;
    v["to_"] = r.to;
    doc["relations_"].push_back(std::move(v));
  }
  return doc.dump();
}

}  // namespace irac
