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
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irac/stable_rng.hpp"

namespace irac {

// JSONL records keep their key order through read/write, so canonical
// records round-trip byte for byte.
using Record = nlohmann::ordered_json;

// One compact object per line, '\n' after each. Returns lines written.
// Throws IoError.
std::size_t write_jsonl(std::span<const Record> records, const std::filesystem::path& path);

// Blank lines are ignored. Throws IoError, LineError (1-based line number).
std::vector<Record> read_jsonl(const std::filesystem::path& path);

// meta.case_id, else top-level case_id; empty when neither exists.
std::string record_case_id(const Record& record);

struct SplitSpec {
  int train_parts = 10;
  int val_parts = 1;
  std::uint64_t seed = 0;
};

// Number of validation cases: round-half-up of n * val / (train + val),
// computed in integers.
constexpr std::size_t validation_case_count(std::size_t n_cases, const SplitSpec& spec) {
  const auto total = static_cast<std::size_t>(spec.train_parts + spec.val_parts);
  return (2 * n_cases * static_cast<std::size_t>(spec.val_parts) + total) / (2 * total);
}

// Chooses the validation cases: distinct ids sorted, shuffled with
// StableRng(seed), first validation_case_count() taken.
template <typename Range>
std::set<std::string> choose_validation_cases(const Range& case_ids, const SplitSpec& spec) {
  std::set<std::string> distinct(std::begin(case_ids), std::end(case_ids));
  std::vector<std::string> order(distinct.begin(), distinct.end());
  StableRng rng(spec.seed);
  rng.shuffle(std::span<std::string>(order));
  const std::size_t n_val = validation_case_count(order.size(), spec);
  return std::set<std::string>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
}

struct SplitResult {
  std::vector<Record> train;
  std::vector<Record> val;
  std::vector<std::string> train_cases;
  std::vector<std::string> val_cases;
  std::vector<std::string> warnings;
};

// Case-level split: every record of a case lands on the same side. Record
// order within each side follows the input. Throws EmptyInput, and
// Error(InvalidLabel) for non-positive parts or a record without a case_id.
SplitResult split_train_val(std::span<const Record> records, const SplitSpec& spec);

struct DatasetStats {
  std::size_t records = 0;
  std::size_t distinct_cases = 0;
  std::size_t distinct_issues = 0;  // distinct (case_id, issue_id)
  double mean_facts = 0.0;          // <fact> elements in the user message
  double mean_chosen = 0.0;         // <rule> elements in chosen / assistant
  double mean_rejected = 0.0;       // <rule> elements in rejected

  nlohmann::ordered_json to_json() const;
};

// Means are rounded to 3 decimals.
DatasetStats dataset_stats(std::span<const Record> records);

}  // namespace irac
