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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "irac/kg.hpp"

namespace irac::review {

enum class EntityGrade { Good, Acceptable, Poor };
enum class RelationVerdict { Pass, Fail };
enum class RecordGrade { Correct, CorrectMinor, Wrong };
enum class ItemKind { Entity, Relation, MissingFlag, SftRecord };

std::string_view to_string(EntityGrade g);
std::string_view to_string(RelationVerdict v);
std::string_view to_string(RecordGrade g);
std::string_view to_string(ItemKind k);
std::optional<EntityGrade> parse_entity_grade(std::string_view s);
std::optional<RelationVerdict> parse_relation_verdict(std::string_view s);
std::optional<RecordGrade> parse_record_grade(std::string_view s);
std::optional<ItemKind> parse_item_kind(std::string_view s);

struct ItemRef {
  std::string case_id;
  ItemKind kind = ItemKind::Entity;
  std::string target_id;

  auto operator<=>(const ItemRef&) const = default;
  bool operator==(const ItemRef&) const = default;
};

// A reviewer's note that the graph of `case_id` lacks an entity.
struct MissingNote {
  EntityKind entity_kind = EntityKind::MaterialFact;
  std::string span;

  bool operator==(const MissingNote&) const = default;
};

using LabelValue = std::variant<EntityGrade, RelationVerdict, MissingNote, RecordGrade>;

struct ReviewLabel {
  ItemRef item;
  LabelValue value;
  std::string reviewer;
  std::string timestamp;  // filled in by the store when empty
};

struct ReviewItem {
  ItemRef ref;
  std::string text;                        // entity label, relation rendering, or record text
  std::optional<EntityKind> entity_kind;   // entity items
  std::optional<RelationKind> relation_kind;
  std::string from;                        // relation items
  std::string to;
};

struct AuditEntry {
  ItemRef item;
  std::string reviewer;
  std::string action;  // "submit", "overwrite", "derive_fail", "reopen", "close"
  nlohmann::ordered_json value;
  std::string timestamp;
};

struct BatchSpec {
  std::size_t n_cases = 1;
  // Item kinds to create; MissingFlag is not an item kind here (flags are
  // submitted freely against sampled cases).
  std::vector<ItemKind> kinds = {ItemKind::Entity, ItemKind::Relation};
  std::uint64_t seed = 0;
};

struct ReviewBatch {
  std::string id;
  BatchSpec spec;
  std::vector<std::string> cases;  // sorted
  std::vector<ReviewItem> items;   // case, kind, target order
  // One effective label per (item, reviewer).
  std::map<std::pair<ItemRef, std::string>, ReviewLabel> labels;
  // Relations currently carrying a derived Fail.
  std::map<ItemRef, std::string> derived_fail;  // relation -> reason
  std::vector<AuditEntry> audit;
  bool closed = false;

  const ReviewItem* find_item(const ItemRef& ref) const;
  bool has_case(std::string_view case_id) const;
};

// An SFT record offered for review: case, record id and the text shown.
struct RecordForReview {
  std::string case_id;
  std::string record_id;
  std::string text;
};

// Deterministic: cases sorted by id, shuffled with StableRng(seed), first
// n_cases kept. Throws InsufficientCases when n_cases exceeds the graphs or is
// zero.
ReviewBatch create_review_batch(std::string id, const std::vector<IracGraph>& graphs, const BatchSpec& spec,
                                const std::vector<RecordForReview>& records = {});

struct SubmitAck {
  std::size_t audit_entries = 0;  // for this (item, reviewer)
  bool overwrote = false;
};

// Throws UnknownItem, ClosedBatch, InvalidLabel (value type does not fit the
// item kind, empty reviewer, empty missing-flag span).
SubmitAck submit_label(ReviewBatch& batch, ReviewLabel label);

struct DeriveResult {
  std::vector<ItemRef> failed;    // newly marked derived Fail
  std::vector<ItemRef> reopened;  // derived Fail lifted (no Poor endpoint any more)
  std::vector<ItemRef> pending;   // some endpoint ungraded and none Poor
};

// Any relation with a Poor endpoint gets a derived Fail, which outranks every
// manual verdict. Idempotent.
DeriveResult derive_relation_verdicts(ReviewBatch& batch, std::string_view timestamp = "");

// Effective grade of an item over all reviewers: majority, ties to the worse
// value. nullopt when ungraded.
std::optional<EntityGrade> effective_entity_grade(const ReviewBatch& batch, const ItemRef& ref);
std::optional<RelationVerdict> effective_relation_verdict(const ReviewBatch& batch, const ItemRef& ref);
std::optional<RecordGrade> effective_record_grade(const ReviewBatch& batch, const ItemRef& ref);

// Integer percent, half rounded up. nullopt when den == 0.
std::optional<int> percent(std::size_t num, std::size_t den);

struct QualityRow {
  EntityKind kind = EntityKind::MaterialFact;
  std::size_t good = 0;
  std::size_t acceptable = 0;
  std::size_t poor = 0;
  std::size_t graded = 0;  // denominator of good / acceptable / poor
  std::size_t missing = 0;
  std::size_t missing_denominator = 0;  // graded + missing
};

struct RelationRow {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t derived_fail = 0;
  std::size_t graded = 0;
};

struct QualityTable {
  std::string batch_id;
  std::vector<QualityRow> rows;        // MaterialFact, LegalIssue, Rule, Conclusion
  std::vector<QualityRow> other_rows;  // remaining kinds present in the batch
  RelationRow relations;
  std::size_t ungraded_entities = 0;
  std::size_t ungraded_relations = 0;

  // Percentages rendered as integers or "n/a".
  nlohmann::ordered_json to_json() const;
};

QualityTable aggregate_quality(const ReviewBatch& batch);

struct RecordQuality {
  std::size_t correct = 0;
  std::size_t correct_minor = 0;
  std::size_t wrong = 0;

  bool operator==(const RecordQuality&) const = default;
  nlohmann::ordered_json to_json() const;
};

RecordQuality aggregate_record_quality(const ReviewBatch& batch);

nlohmann::ordered_json item_json(const ReviewItem& item);
nlohmann::ordered_json label_value_json(const LabelValue& value);
// Reads {"case_id","kind","target_id","value","reviewer"}. Throws InvalidLabel.
ReviewLabel label_from_json(const nlohmann::json& j);

nlohmann::ordered_json batch_to_json(const ReviewBatch& batch);
ReviewBatch batch_from_json(const nlohmann::json& j);

// ISO-8601 UTC with seconds.
using Clock = std::function<std::string()>;
std::string utc_now();

// Batches in memory, persisted to <root>/<id>.json after every change when a
// root is given. Writers are serialized per batch; readers get immutable
// snapshots.
class ReviewStore {
 public:
  explicit ReviewStore(std::optional<std::filesystem::path> root = std::nullopt, Clock clock = utc_now);

  // Ids are B0001, B0002, ... continuing after any persisted batch.
  std::shared_ptr<const ReviewBatch> create(const std::vector<IracGraph>& graphs, const BatchSpec& spec,
                                            const std::vector<RecordForReview>& records = {});
  std::vector<std::shared_ptr<const ReviewBatch>> list() const;
  // Throws UnknownBatch.
  std::shared_ptr<const ReviewBatch> get(std::string_view id) const;

  SubmitAck submit(std::string_view batch_id, ReviewLabel label);
  DeriveResult derive(std::string_view batch_id);
  void close(std::string_view batch_id);

 private:
  struct Slot {
    std::mutex write;
    std::shared_ptr<const ReviewBatch> current;
  };

  std::shared_ptr<Slot> slot(std::string_view id) const;
  void persist(const ReviewBatch& batch) const;
  template <typename Fn>
  auto update(std::string_view id, Fn&& fn);

  std::optional<std::filesystem::path> root_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> batches_;
  std::size_t next_id_ = 1;
  std::mutex create_mutex_;
};

}  // namespace irac::review
