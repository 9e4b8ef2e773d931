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

#include "irac/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "irac/errors.hpp"
#include "irac/fsutil.hpp"

namespace irac {

namespace fs = std::filesystem;

std::size_t write_jsonl(std::span<const Record> records, const fs::path& path) {
  std::string body;
  for (const auto& r : records) {
    body += r.dump();
    body += '\n';
  }
  fsutil::atomic_write(path, body);
  return records.size();
}

std::vector<Record> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Record> records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      records.push_back(Record::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw LineError(n, e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path.string());
  return records;
}

std::string record_case_id(const Record& record) {
  if (!record.is_object()) return {};
  if (auto meta = record.find("meta"); meta != record.end() && meta->is_object()) {
    if (auto id = meta->find("case_id"); id != meta->end() && id->is_string()) return id->get<std::string>();
  }
  if (auto id = record.find("case_id"); id != record.end() && id->is_string()) return id->get<std::string>();
  return {};
}

SplitResult split_train_val(std::span<const Record> records, const SplitSpec& spec) {
  if (spec.train_parts < 1 || spec.val_parts < 1) {
    throw Error(ErrorCode::InvalidLabel, "split parts must be >= 1");
  }
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records to split");
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string id = record_case_id(records[i]);
    if (id.empty()) throw Error(ErrorCode::InvalidLabel, "record " + std::to_string(i + 1) + " has no case_id");
    ids.push_back(std::move(id));
  }
  const std::set<std::string> val_cases = choose_validation_cases(ids, spec);

  SplitResult result;
  std::set<std::string> train_cases;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (val_cases.count(ids[i])) {
      result.val.push_back(records[i]);
    } else {
      result.train.push_back(records[i]);
      train_cases.insert(ids[i]);
    }
  }
  result.train_cases.assign(train_cases.begin(), train_cases.end());
  result.val_cases.assign(val_cases.begin(), val_cases.end());
  if (result.val_cases.empty()) {
    result.warnings.push_back("validation split is empty: " + std::to_string(result.train_cases.size()) +
                              " case(s) are too few for a " + std::to_string(spec.train_parts) + ":" +
                              std::to_string(spec.val_parts) + " ratio");
  }
  return result;
}

namespace {

std::size_t count_tag(const Record& record, const char* field, std::string_view tag) {
  const auto it = record.find(field);
  if (it == record.end() || !it->is_string()) return 0;
  const auto& s = it->get_ref<const std::string&>();
  std::size_t n = 0;
  for (std::size_t pos = s.find(tag); pos != std::string::npos; pos = s.find(tag, pos + tag.size())) ++n;
  return n;
}

double mean3(std::size_t total, std::size_t n) {
  if (n == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(total) / static_cast<double>(n)) / 1000.0;
}

}  // namespace

DatasetStats dataset_stats(std::span<const Record> records) {
  DatasetStats stats;
  std::set<std::string> cases;
  std::set<std::pair<std::string, std::string>> issues;
  std::size_t facts = 0, chosen = 0, rejected = 0;
  for (const auto& r : records) {
    const std::string case_id = record_case_id(r);
    cases.insert(case_id);
    std::string issue_id;
    if (auto meta = r.find("meta"); meta != r.end() && meta->is_object()) {
      if (auto id = meta->find("issue_id"); id != meta->end() && id->is_string()) issue_id = id->get<std::string>();
    }
    issues.emplace(case_id, issue_id);
    facts += count_tag(r, "user", "<fact>");
    chosen += r.contains("chosen") ? count_tag(r, "chosen", "<rule>") : count_tag(r, "assistant", "<rule>");
    rejected += count_tag(r, "rejected", "<rule>");
  }
  stats.records = records.size();
  stats.distinct_cases = cases.size();
  stats.distinct_issues = issues.size();
  stats.mean_facts = mean3(facts, records.size());
  stats.mean_chosen = mean3(chosen, records.size());
  stats.mean_rejected = mean3(rejected, records.size());
  return stats;
}

nlohmann::ordered_json DatasetStats::to_json() const {
  nlohmann::ordered_json j;
  j["records"] = records;
  j["distinct_cases"] = distinct_cases;
  j["distinct_issues"] = distinct_issues;
  j["mean_facts"] = mean_facts;
  j["mean_chosen"] = mean_chosen;
  j["mean_rejected"] = mean_rejected;
  return j;
}

}  // namespace irac
