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

#include "irac/review.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <set>

#include "irac/errors.hpp"
#include "irac/fsutil.hpp"
#include "irac/stable_rng.hpp"

namespace irac::review {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(EntityGrade g) {
  switch (g) {
    case EntityGrade::Good: return "Good";
    case EntityGrade::Acceptable: return "Acceptable";
    case EntityGrade::Poor: return "Poor";
  }
  return "Poor";
}

std::string_view to_string(RelationVerdict v) { return v == RelationVerdict::Pass ? "Pass" : "Fail"; }

std::string_view to_string(RecordGrade g) {
  switch (g) {
    case RecordGrade::Correct: return "Correct";
    case RecordGrade::CorrectMinor: return "CorrectMinor";
    case RecordGrade::Wrong: return "Wrong";
  }
  return "Wrong";
}

std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::Entity: return "entity";
    case ItemKind::Relation: return "relation";
    case ItemKind::MissingFlag: return "missing_flag";
    case ItemKind::SftRecord: return "sft_record";
  }
  return "entity";
}

std::optional<EntityGrade> parse_entity_grade(std::string_view s) {
  const std::string v = lower(s);
  if (v == "good") return EntityGrade::Good;
  if (v == "acceptable") return EntityGrade::Acceptable;
  if (v == "poor") return EntityGrade::Poor;
  return std::nullopt;
}

std::optional<RelationVerdict> parse_relation_verdict(std::string_view s) {
  const std::string v = lower(s);
  if (v == "pass") return RelationVerdict::Pass;
  if (v == "fail") return RelationVerdict::Fail;
  return std::nullopt;
}

std::optional<RecordGrade> parse_record_grade(std::string_view s) {
  const std::string v = lower(s);
  if (v == "correct") return RecordGrade::Correct;
  if (v == "correctminor" || v == "correct_minor" || v == "correct with minor issues") return RecordGrade::CorrectMinor;
  if (v == "wrong") return RecordGrade::Wrong;
  return std::nullopt;
}

std::optional<ItemKind> parse_item_kind(std::string_view s) {
  const std::string v = lower(s);
  if (v == "entity") return ItemKind::Entity;
  if (v == "relation") return ItemKind::Relation;
  if (v == "missing_flag") return ItemKind::MissingFlag;
  if (v == "sft_record") return ItemKind::SftRecord;
  return std::nullopt;
}

const ReviewItem* ReviewBatch::find_item(const ItemRef& ref) const {
  auto it = std::lower_bound(items.begin(), items.end(), ref,
                             [](const ReviewItem& item, const ItemRef& r) { return item.ref < r; });
  if (it == items.end() || it->ref != ref) return nullptr;
  return &*it;
}

bool ReviewBatch::has_case(std::string_view case_id) const {
  return std::binary_search(cases.begin(), cases.end(), case_id, std::less<>());
}

ReviewBatch create_review_batch(std::string id, const std::vector<IracGraph>& graphs, const BatchSpec& spec,
                                const std::vector<RecordForReview>& records) {
  if (spec.n_cases == 0) throw Error(ErrorCode::InsufficientCases, "n_cases must be at least 1");
  std::vector<const IracGraph*> order;
  for (const auto& g : graphs) order.push_back(&g);
  std::sort(order.begin(), order.end(), [](const IracGraph* a, const IracGraph* b) { return a->case_id() < b->case_id(); });
  order.erase(std::unique(order.begin(), order.end(),
                          [](const IracGraph* a, const IracGraph* b) { return a->case_id() == b->case_id(); }),
              order.end());
  if (spec.n_cases > order.size()) {
    throw Error(ErrorCode::InsufficientCases, "requested " + std::to_string(spec.n_cases) + " cases, only " +
                                                  std::to_string(order.size()) + " available");
  }
  StableRng rng(spec.seed);
  rng.shuffle(std::span<const IracGraph*>(order));
  order.resize(spec.n_cases);
  std::sort(order.begin(), order.end(), [](const IracGraph* a, const IracGraph* b) { return a->case_id() < b->case_id(); });

  auto wants = [&](ItemKind k) { return std::find(spec.kinds.begin(), spec.kinds.end(), k) != spec.kinds.end(); };

  ReviewBatch batch;
  batch.id = std::move(id);
  batch.spec = spec;
  for (const IracGraph* g : order) {
    batch.cases.push_back(g->case_id());
    if (wants(ItemKind::Entity)) {
      for (const auto& e : g->entities()) {
        ReviewItem item;
        item.ref = {g->case_id(), ItemKind::Entity, e.id};
        item.text = e.label;
        item.entity_kind = e.kind;
        batch.items.push_back(std::move(item));
      }
    }
    if (wants(ItemKind::Relation)) {
      for (const auto& r : g->relations()) {
        ReviewItem item;
        item.ref = {g->case_id(), ItemKind::Relation, r.id};
        item.relation_kind = r.kind;
        item.from = r.from;
        item.to = r.to;
        item.text = std::string(to_string(r.kind)) + "(" + r.from + " -> " + r.to + ")";
        batch.items.push_back(std::move(item));
      }
    }
  }
  if (wants(ItemKind::SftRecord)) {
    for (const auto& rec : records) {
      if (!batch.has_case(rec.case_id)) continue;
      ReviewItem item;
      item.ref = {rec.case_id, ItemKind::SftRecord, rec.record_id};
      item.text = rec.text;
      batch.items.push_back(std::move(item));
    }
  }
  std::sort(batch.items.begin(), batch.items.end(),
            [](const ReviewItem& a, const ReviewItem& b) { return a.ref < b.ref; });
  batch.items.erase(std::unique(batch.items.begin(), batch.items.end(),
                                [](const ReviewItem& a, const ReviewItem& b) { return a.ref == b.ref; }),
                    batch.items.end());
  return batch;
}

nlohmann::ordered_json label_value_json(const LabelValue& value) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MissingNote>) {
          return {{"entity_kind", to_string(v.entity_kind)}, {"span", v.span}};
        } else {
          return std::string(to_string(v));
        }
      },
      value);
}

namespace {

nlohmann::ordered_json ref_json(const ItemRef& ref) {
  return {{"case_id", ref.case_id}, {"kind", to_string(ref.kind)}, {"target_id", ref.target_id}};
}

bool value_fits(ItemKind kind, const LabelValue& value) {
  switch (kind) {
    case ItemKind::Entity: return std::holds_alternative<EntityGrade>(value);
    case ItemKind::Relation: return std::holds_alternative<RelationVerdict>(value);
    case ItemKind::MissingFlag: return std::holds_alternative<MissingNote>(value);
    case ItemKind::SftRecord: return std::holds_alternative<RecordGrade>(value);
  }
  return false;
}

}  // namespace

SubmitAck submit_label(ReviewBatch& batch, ReviewLabel label) {
  if (batch.closed) throw Error(ErrorCode::ClosedBatch, "batch " + batch.id + " is closed");
  if (label.item.kind == ItemKind::MissingFlag) {
    // Flags point at something the graph lacks, so there is no item to find;
    // the case must still belong to the batch.
    if (!batch.has_case(label.item.case_id) || label.item.target_id.empty()) {
      throw Error(ErrorCode::UnknownItem, "no case " + label.item.case_id + " in batch " + batch.id);
    }
  } else if (!batch.find_item(label.item)) {
    throw Error(ErrorCode::UnknownItem, std::string(to_string(label.item.kind)) + " " + label.item.target_id +
                                            " of case " + label.item.case_id + " is not in batch " + batch.id);
  }
  if (!value_fits(label.item.kind, label.value)) {
    throw Error(ErrorCode::InvalidLabel, "value does not fit a " + std::string(to_string(label.item.kind)) + " item");
  }
  if (label.reviewer.empty()) throw Error(ErrorCode::InvalidLabel, "reviewer is empty");
  if (const auto* note = std::get_if<MissingNote>(&label.value); note && note->span.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::InvalidLabel, "missing-entity flag has an empty span");
  }

  const auto key = std::make_pair(label.item, label.reviewer);
  SubmitAck ack;
  ack.overwrote = batch.labels.count(key) > 0;
  batch.audit.push_back({label.item, label.reviewer, ack.overwrote ? "overwrite" : "submit",
                         label_value_json(label.value), label.timestamp});
  batch.labels[key] = std::move(label);
  ack.audit_entries = static_cast<std::size_t>(std::count_if(
      batch.audit.begin(), batch.audit.end(), [&](const AuditEntry& a) { return a.item == key.first && a.reviewer == key.second; }));
  return ack;
}

namespace {

// Values of every reviewer's label for one item.
template <typename T>
std::vector<T> values_for(const ReviewBatch& batch, const ItemRef& ref) {
  std::vector<T> out;
  for (auto it = batch.labels.lower_bound({ref, std::string()}); it != batch.labels.end() && it->first.first == ref;
       ++it) {
    if (const T* v = std::get_if<T>(&it->second.value)) out.push_back(*v);
  }
  return out;
}

// Majority vote; ties go to the largest enumerator, which is the worst value
// in each of the grade enums.
template <typename T>
std::optional<T> majority(const std::vector<T>& values) {
  if (values.empty()) return std::nullopt;
  std::map<T, std::size_t> counts;
  for (T v : values) ++counts[v];
  T best = counts.begin()->first;
  std::size_t best_n = 0;
  for (const auto& [v, n] : counts) {
    if (n >= best_n) {
      best = v;
      best_n = n;
    }
  }
  return best;
}

}  // namespace

std::optional<EntityGrade> effective_entity_grade(const ReviewBatch& batch, const ItemRef& ref) {
  return majority(values_for<EntityGrade>(batch, ref));
}

std::optional<RelationVerdict> effective_relation_verdict(const ReviewBatch& batch, const ItemRef& ref) {
  if (batch.derived_fail.count(ref)) return RelationVerdict::Fail;
  return majority(values_for<RelationVerdict>(batch, ref));
}

std::optional<RecordGrade> effective_record_grade(const ReviewBatch& batch, const ItemRef& ref) {
  return majority(values_for<RecordGrade>(batch, ref));
}

DeriveResult derive_relation_verdicts(ReviewBatch& batch, std::string_view timestamp) {
  DeriveResult result;
  for (const auto& item : batch.items) {
    if (item.ref.kind != ItemKind::Relation) continue;
    bool any_poor = false;
    bool any_ungraded = false;
    for (const std::string& end : {item.from, item.to}) {
      const auto grade = effective_entity_grade(batch, {item.ref.case_id, ItemKind::Entity, end});
      if (!grade) {
        any_ungraded = true;
      } else if (*grade == EntityGrade::Poor) {
        any_poor = true;
      }
    }
    const bool was_failed = batch.derived_fail.count(item.ref) > 0;
    if (any_poor) {
      if (!was_failed) {
        batch.derived_fail[item.ref] = "endpoint graded Poor";
        batch.audit.push_back({item.ref, "derive", "derive_fail", "Fail", std::string(timestamp)});
        result.failed.push_back(item.ref);
      }
      continue;
    }
    if (was_failed) {
      batch.derived_fail.erase(item.ref);
      batch.audit.push_back({item.ref, "derive", "reopen", nullptr, std::string(timestamp)});
      result.reopened.push_back(item.ref);
    }
    if (any_ungraded) result.pending.push_back(item.ref);
  }
  return result;
}

std::optional<int> percent(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<int>((200 * num + den) / (2 * den));
}

namespace {

constexpr std::array<EntityKind, 4> kTableKinds = {EntityKind::MaterialFact, EntityKind::LegalIssue, EntityKind::Rule,
                                                   EntityKind::Conclusion};

nlohmann::ordered_json pct_json(std::size_t num, std::size_t den) {
  const auto p = percent(num, den);
  return p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json("n/a");
}

nlohmann::ordered_json row_json(const QualityRow& r) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(r.kind);
  j["good_pct"] = pct_json(r.good, r.graded);
  j["acceptable_pct"] = pct_json(r.acceptable, r.graded);
  j["poor_pct"] = pct_json(r.poor, r.graded);
  j["missing_pct"] = pct_json(r.missing, r.missing_denominator);
  j["good"] = r.good;
  j["acceptable"] = r.acceptable;
  j["poor"] = r.poor;
  j["graded"] = r.graded;
  j["missing"] = r.missing;
  j["missing_denominator"] = r.missing_denominator;
  return j;
}

}  // namespace

QualityTable aggregate_quality(const ReviewBatch& batch) {
  std::map<EntityKind, QualityRow> rows;
  std::set<EntityKind> present;
  QualityTable table;
  table.batch_id = batch.id;

  for (const auto& item : batch.items) {
    if (item.ref.kind == ItemKind::Entity) {
      present.insert(*item.entity_kind);
      QualityRow& row = rows[*item.entity_kind];
      const auto grade = effective_entity_grade(batch, item.ref);
      if (!grade) {
        ++table.ungraded_entities;
        continue;
      }
      ++row.graded;
      switch (*grade) {
        case EntityGrade::Good: ++row.good; break;
        case EntityGrade::Acceptable: ++row.acceptable; break;
        case EntityGrade::Poor: ++row.poor; break;
      }
    } else if (item.ref.kind == ItemKind::Relation) {
      const auto verdict = effective_relation_verdict(batch, item.ref);
      if (!verdict) {
        ++table.ungraded_relations;
        continue;
      }
      ++table.relations.graded;
      if (*verdict == RelationVerdict::Pass) {
        ++table.relations.pass;
      } else {
        ++table.relations.fail;
        if (batch.derived_fail.count(item.ref)) ++table.relations.derived_fail;
      }
    }
  }
  // A flag counts once per (case, flag id), whoever raised it.
  std::map<std::pair<std::string, std::string>, EntityKind> flags;
  for (const auto& [key, label] : batch.labels) {
    if (const auto* note = std::get_if<MissingNote>(&label.value)) {
      flags.emplace(std::make_pair(key.first.case_id, key.first.target_id), note->entity_kind);
    }
  }
  for (const auto& [_, kind] : flags) {
    present.insert(kind);
    ++rows[kind].missing;
  }

  for (auto& [kind, row] : rows) {
    row.kind = kind;
    row.missing_denominator = row.graded + row.missing;
  }
  for (EntityKind k : kTableKinds) {
    QualityRow row = rows.count(k) ? rows[k] : QualityRow{};
    row.kind = k;
    table.rows.push_back(row);
  }
  for (EntityKind k : kAllEntityKinds) {
    if (std::find(kTableKinds.begin(), kTableKinds.end(), k) != kTableKinds.end() || !present.count(k)) continue;
    table.other_rows.push_back(rows[k]);
  }
  return table;
}

nlohmann::ordered_json QualityTable::to_json() const {
  nlohmann::ordered_json j;
  j["batch_id"] = batch_id;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) j["rows"].push_back(row_json(r));
  j["other_rows"] = nlohmann::ordered_json::array();
  for (const auto& r : other_rows) j["other_rows"].push_back(row_json(r));
  nlohmann::ordered_json rel;
  rel["pass_pct"] = pct_json(relations.pass, relations.graded);
  rel["fail_pct"] = pct_json(relations.fail, relations.graded);
  rel["pass"] = relations.pass;
  rel["fail"] = relations.fail;
  rel["derived_fail"] = relations.derived_fail;
  rel["graded"] = relations.graded;
  j["relations"] = rel;
  j["ungraded_entities"] = ungraded_entities;
  j["ungraded_relations"] = ungraded_relations;
  return j;
}

RecordQuality aggregate_record_quality(const ReviewBatch& batch) {
  RecordQuality q;
  for (const auto& item : batch.items) {
    if (item.ref.kind != ItemKind::SftRecord) continue;
    const auto grade = effective_record_grade(batch, item.ref);
    if (!grade) continue;
    switch (*grade) {
      case RecordGrade::Correct: ++q.correct; break;
      case RecordGrade::CorrectMinor: ++q.correct_minor; break;
      case RecordGrade::Wrong: ++q.wrong; break;
    }
  }
  return q;
}

nlohmann::ordered_json RecordQuality::to_json() const {
  return {{"Correct", correct}, {"CorrectMinor", correct_minor}, {"Wrong", wrong}};
}

nlohmann::ordered_json item_json(const ReviewItem& item) {
  nlohmann::ordered_json j = ref_json(item.ref);
  j["text"] = item.text;
  if (item.entity_kind) j["entity_kind"] = to_string(*item.entity_kind);
  if (item.relation_kind) {
    j["relation_kind"] = to_string(*item.relation_kind);
    j["from"] = item.from;
    j["to"] = item.to;
  }
  return j;
}

namespace {

std::string required_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
    throw Error(ErrorCode::InvalidLabel, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

LabelValue value_from_json(ItemKind kind, const nlohmann::json& v) {
  auto bad = [&] { return Error(ErrorCode::InvalidLabel, "bad value for a " + std::string(to_string(kind)) + " label"); };
  switch (kind) {
    case ItemKind::Entity: {
      if (!v.is_string()) throw bad();
      if (auto g = parse_entity_grade(v.get<std::string>())) return *g;
      throw bad();
    }
    case ItemKind::Relation: {
      if (!v.is_string()) throw bad();
      if (auto r = parse_relation_verdict(v.get<std::string>())) return *r;
      throw bad();
    }
    case ItemKind::SftRecord: {
      if (!v.is_string()) throw bad();
      if (auto g = parse_record_grade(v.get<std::string>())) return *g;
      throw bad();
    }
    case ItemKind::MissingFlag: {
      if (!v.is_object()) throw bad();
      const auto kind_name = v.find("entity_kind");
      if (kind_name == v.end() || !kind_name->is_string()) throw bad();
      const auto ek = parse_entity_kind(kind_name->get<std::string>());
      if (!ek) throw bad();
      const auto span = v.find("span");
      return MissingNote{*ek, span != v.end() && span->is_string() ? span->get<std::string>() : std::string()};
    }
  }
  throw bad();
}

}  // namespace

ReviewLabel label_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidLabel, "label must be an object");
  ReviewLabel label;
  label.item.case_id = required_string(j, "case_id");
  const auto kind = parse_item_kind(required_string(j, "kind"));
  if (!kind) throw Error(ErrorCode::InvalidLabel, "unknown item kind");
  label.item.kind = *kind;
  label.item.target_id = required_string(j, "target_id");
  auto value = j.find("value");
  if (value == j.end()) throw Error(ErrorCode::InvalidLabel, "missing field \"value\"");
  label.value = value_from_json(*kind, *value);
  label.reviewer = required_string(j, "reviewer");
  if (auto ts = j.find("timestamp"); ts != j.end() && ts->is_string()) label.timestamp = ts->get<std::string>();
  return label;
}

nlohmann::ordered_json batch_to_json(const ReviewBatch& batch) {
  nlohmann::ordered_json j;
  j["id"] = batch.id;
  nlohmann::ordered_json kinds = nlohmann::ordered_json::array();
  for (ItemKind k : batch.spec.kinds) kinds.push_back(to_string(k));
  j["spec"] = {{"n_cases", batch.spec.n_cases}, {"kinds", kinds}, {"seed", batch.spec.seed}};
  j["cases"] = batch.cases;
  j["closed"] = batch.closed;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& item : batch.items) j["items"].push_back(item_json(item));
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& [_, label] : batch.labels) {
    nlohmann::ordered_json l = ref_json(label.item);
    l["value"] = label_value_json(label.value);
    l["reviewer"] = label.reviewer;
    l["timestamp"] = label.timestamp;
    j["labels"].push_back(std::move(l));
  }
  j["derived_fail"] = nlohmann::ordered_json::array();
  for (const auto& [ref, reason] : batch.derived_fail) {
    nlohmann::ordered_json d = ref_json(ref);
    d["reason"] = reason;
    j["derived_fail"].push_back(std::move(d));
  }
  j["audit"] = nlohmann::ordered_json::array();
  for (const auto& a : batch.audit) {
    nlohmann::ordered_json e = ref_json(a.item);
    e["reviewer"] = a.reviewer;
    e["action"] = a.action;
    e["value"] = a.value;
    e["timestamp"] = a.timestamp;
    j["audit"].push_back(std::move(e));
  }
  return j;
}

namespace {

ItemRef ref_from_json(const nlohmann::json& j) {
  const auto kind = parse_item_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::InvalidLabel, "unknown item kind in stored batch");
  return {j.at("case_id").get<std::string>(), *kind, j.at("target_id").get<std::string>()};
}

}  // namespace

ReviewBatch batch_from_json(const nlohmann::json& j) {
  try {
    ReviewBatch batch;
    batch.id = j.at("id").get<std::string>();
    const auto& spec = j.at("spec");
    batch.spec.n_cases = spec.at("n_cases").get<std::size_t>();
    batch.spec.seed = spec.at("seed").get<std::uint64_t>();
    batch.spec.kinds.clear();
    for (const auto& k : spec.at("kinds")) {
      if (auto kind = parse_item_kind(k.get<std::string>())) batch.spec.kinds.push_back(*kind);
    }
    batch.cases = j.at("cases").get<std::vector<std::string>>();
    batch.closed = j.at("closed").get<bool>();
    for (const auto& i : j.at("items")) {
      ReviewItem item;
      item.ref = ref_from_json(i);
      item.text = i.at("text").get<std::string>();
      if (i.contains("entity_kind")) item.entity_kind = parse_entity_kind(i["entity_kind"].get<std::string>());
      if (i.contains("relation_kind")) {
        item.relation_kind = parse_relation_kind(i["relation_kind"].get<std::string>());
        item.from = i.at("from").get<std::string>();
        item.to = i.at("to").get<std::string>();
      }
      batch.items.push_back(std::move(item));
    }
    for (const auto& l : j.at("labels")) {
      ReviewLabel label = label_from_json(l);
      batch.labels[{label.item, label.reviewer}] = std::move(label);
    }
    for (const auto& d : j.at("derived_fail")) batch.derived_fail[ref_from_json(d)] = d.at("reason").get<std::string>();
    for (const auto& a : j.at("audit")) {
      batch.audit.push_back({ref_from_json(a), a.at("reviewer").get<std::string>(), a.at("action").get<std::string>(),
                             a.at("value"), a.at("timestamp").get<std::string>()});
    }
    return batch;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("corrupt review batch: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ReviewStore::ReviewStore(std::optional<fs::path> root, Clock clock) : root_(std::move(root)), clock_(std::move(clock)) {
  if (!root_) return;
  std::error_code ec;
  if (!fs::is_directory(*root_, ec)) return;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(*root_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const auto raw = fsutil::read_file(path);
    if (!raw) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    const auto doc = nlohmann::json::parse(*raw, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::IoError, "corrupt review batch " + path.string());
    auto batch = std::make_shared<const ReviewBatch>(batch_from_json(doc));
    const std::string& id = batch->id;
    if (id.size() > 1 && id[0] == 'B') {
      try {
        next_id_ = std::max(next_id_, static_cast<std::size_t>(std::stoul(id.substr(1))) + 1);
      } catch (const std::exception&) {
      }
    }
    auto s = std::make_shared<Slot>();
    s->current = std::move(batch);
    batches_.emplace(id, std::move(s));
  }
}

void ReviewStore::persist(const ReviewBatch& batch) const {
  if (!root_) return;
  fsutil::atomic_write(*root_ / (batch.id + ".json"), batch_to_json(batch).dump(2) + "\n");
}

std::shared_ptr<ReviewStore::Slot> ReviewStore::slot(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = batches_.find(id);
  if (it == batches_.end()) throw Error(ErrorCode::UnknownBatch, "no batch " + std::string(id));
  return it->second;
}

std::shared_ptr<const ReviewBatch> ReviewStore::create(const std::vector<IracGraph>& graphs, const BatchSpec& spec,
                                                       const std::vector<RecordForReview>& records) {
  std::lock_guard create_lock(create_mutex_);
  char id[16];
  std::snprintf(id, sizeof id, "B%04zu", next_id_);
  auto batch = std::make_shared<const ReviewBatch>(create_review_batch(id, graphs, spec, records));
  persist(*batch);
  ++next_id_;
  auto s = std::make_shared<Slot>();
  s->current = batch;
  std::unique_lock lock(mutex_);
  batches_.emplace(batch->id, std::move(s));
  return batch;
}

std::vector<std::shared_ptr<const ReviewBatch>> ReviewStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const ReviewBatch>> out;
  for (const auto& [_, s] : batches_) out.push_back(std::atomic_load(&s->current));
  return out;
}

std::shared_ptr<const ReviewBatch> ReviewStore::get(std::string_view id) const {
  return std::atomic_load(&slot(id)->current);
}

// Copy, mutate, persist, publish: readers keep whatever snapshot they hold.
template <typename Fn>
auto ReviewStore::update(std::string_view id, Fn&& fn) {
  auto s = slot(id);
  std::lock_guard write_lock(s->write);
  auto next = std::make_shared<ReviewBatch>(*std::atomic_load(&s->current));
  auto result = fn(*next);
  persist(*next);
  std::atomic_store(&s->current, std::shared_ptr<const ReviewBatch>(std::move(next)));
  return result;
}

SubmitAck ReviewStore::submit(std::string_view batch_id, ReviewLabel label) {
  if (label.timestamp.empty()) label.timestamp = clock_();
  return update(batch_id, [&](ReviewBatch& b) { return submit_label(b, std::move(label)); });
}

DeriveResult ReviewStore::derive(std::string_view batch_id) {
  const std::string now = clock_();
  return update(batch_id, [&](ReviewBatch& b) { return derive_relation_verdicts(b, now); });
}

void ReviewStore::close(std::string_view batch_id) {
  const std::string now = clock_();
  update(batch_id, [&](ReviewBatch& b) {
    if (!b.closed) {
      b.closed = true;
      b.audit.push_back({ItemRef{}, "", "close", nullptr, now});
    }
    return 0;
  });
}

}  // namespace irac::review
