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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace irac {

// ---------------------------------------------------------------------------
// Schema

enum class EntityKind { Case, CitedCase, MaterialFact, LegalIssue, Conclusion, Rule, Statute, Regulation };

inline constexpr std::array<EntityKind, 8> kAllEntityKinds = {
    EntityKind::Case,       EntityKind::CitedCase, EntityKind::MaterialFact, EntityKind::LegalIssue,
    EntityKind::Conclusion, EntityKind::Rule,      EntityKind::Statute,      EntityKind::Regulation};

enum class RelationKind { Cites, References, ArisesFrom, Addresses, AppliedTo, DerivesFrom, LeadsTo };

inline constexpr std::array<RelationKind, 7> kAllRelationKinds = {
    RelationKind::Cites,     RelationKind::References,  RelationKind::ArisesFrom, RelationKind::Addresses,
    RelationKind::AppliedTo, RelationKind::DerivesFrom, RelationKind::LeadsTo};

// Wire names: "MaterialFact", "ARISES_FROM", ... Parsing is exact-match.
std::string_view to_string(EntityKind kind);
std::string_view to_string(RelationKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);
std::optional<RelationKind> parse_relation_kind(std::string_view name);

struct EndpointRule {
  std::span<const EntityKind> sources;
  std::span<const EntityKind> targets;

  bool allows(EntityKind from, EntityKind to) const;
};

// Static table; one row per relation kind.
EndpointRule relation_endpoint_rule(RelationKind kind);

// ---------------------------------------------------------------------------
// Graph

struct Entity {
  std::string id;
  EntityKind kind{};
  std::string label;

  bool operator==(const Entity&) const = default;
};

struct Relation {
  std::string id;
  RelationKind kind{};
  std::string from;
  std::string to;

  bool operator==(const Relation&) const = default;
};

// One case's IRAC graph. Immutable once built; the constructor indexes
// entities by id and relations by endpoint but does not validate (see
// validate_graph). With duplicate ids the first entity wins in lookups.
class IracGraph {
 public:
  IracGraph() = default;
  IracGraph(std::string case_id, std::vector<Entity> entities, std::vector<Relation> relations);

  const std::string& case_id() const { return case_id_; }
  std::span<const Entity> entities() const { return entities_; }
  std::span<const Relation> relations() const { return relations_; }

  const Entity* find_entity(std::string_view id) const;
  // Indices into relations() of edges ending at / starting from `id`.
  std::span<const std::size_t> incoming(std::string_view id) const;
  std::span<const std::size_t> outgoing(std::string_view id) const;

  bool operator==(const IracGraph& other) const {
    return case_id_ == other.case_id_ && entities_ == other.entities_ && relations_ == other.relations_;
  }

 private:
  std::string case_id_;
  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> incoming_;
  std::unordered_map<std::string, std::vector<std::size_t>> outgoing_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode { DuplicateId, DanglingEndpoint, EndpointKind, UnknownKind, MissingField, EmptyLabel };

// DUPLICATE_ID, DANGLING_ENDPOINT, ...
std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code{};
  std::string subject_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> dropped_relations;
  // Wire entities that cannot be represented (unknown kind, missing field,
  // empty label, repeated id); these never reach an IracGraph.
  std::vector<std::string> dropped_entities;

  bool is_valid_strict() const { return violations.empty(); }
  std::size_t count(ViolationCode code) const;
};

ValidationReport validate_graph(const IracGraph& graph);

// ---------------------------------------------------------------------------
// Wire format
//
//   {"vertices_":[{"id_":..,"type_":..,"label_":..}],
//    "relations_":[{"id_":..,"type_":..,"from_":..,"to_":..}]}

enum class ParseMode { Strict, Lenient };

struct ParseOptions {
  ParseMode mode = ParseMode::Lenient;
  // When the document has no Case entity but carries CITES/REFERENCES edges,
  // add {id "CASE", kind Case, label case_id} and point those edges' unresolved
  // sources at it.
  bool synthesize_case_entity = false;
};

struct ParsedGraph {
  // Strict: present only when the report is clean. Lenient: always present,
  // with offending relations removed.
  std::optional<IracGraph> graph;
  ValidationReport report;
  bool synthesized_case = false;
};

// Throws UnparseableDocument when no JSON object can be recovered, even after
// repair_json.
ParsedGraph parse_graph_json(std::string_view text, std::string case_id, const ParseOptions& options = {});

// Compact, canonical key order, stored element order. Throws InvalidGraph
// unless the graph is strict-valid.
std::string serialize_graph(const IracGraph& graph);

}  // namespace irac
