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

#include <string_view>
#include <vector>

#include "irac/kg.hpp"

namespace irac {

// Entities of a single kind, unique by id, sorted by ascending id (bytewise).
// The fixed order is what makes rendered prompts and records byte-stable.
class EntitySet {
 public:
  EntitySet() = default;
  explicit EntitySet(std::vector<Entity> members);

  const std::vector<Entity>& members() const { return members_; }
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  std::vector<std::string> labels() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool operator==(const EntitySet&) const = default;

 private:
  std::vector<Entity> members_;
};

using FactSet = EntitySet;
using RuleSet = EntitySet;

// Union / difference by id.
RuleSet set_union(const RuleSet& a, const RuleSet& b);
RuleSet set_difference(const RuleSet& a, const RuleSet& b);

// Facts f with ARISES_FROM(issue -> f). Throws NotAnIssue.
FactSet get_related_facts(const IracGraph& graph, std::string_view issue_id);

// Rules r with APPLIED_TO(r -> fact). Throws NotAFact.
RuleSet get_rules_via_apply(const IracGraph& graph, std::string_view fact_id);

// Rules r with ADDRESSES(r -> issue). Throws NotAnIssue.
RuleSet get_rules_via_address(const IracGraph& graph, std::string_view issue_id);

// Rules applied to any related fact, plus rules addressing the issue.
RuleSet applicable_rules(const IracGraph& graph, std::string_view issue_id);

RuleSet all_rules(const IracGraph& graph);

// all_rules minus applicable_rules: the pre-judge rejected candidates.
RuleSet candidate_rejected(const IracGraph& graph, std::string_view issue_id);

// LegalIssue entities in ascending id order.
std::vector<Entity> legal_issues(const IracGraph& graph);

}  // namespace irac
