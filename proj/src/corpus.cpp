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

#include "irac/corpus.hpp"

#include <algorithm>
#include <map>

#include "irac/errors.hpp"
#include "irac/fsutil.hpp"
#include "irac/hashing.hpp"
#include "irac/stable_rng.hpp"
#include "irac/text.hpp"

namespace irac {

namespace fs = std::filesystem;

CaseCorpus::CaseCorpus(std::vector<CaseDocument> cases) : cases_(std::move(cases)) {
  index_.reserve(cases_.size());
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    auto [it, inserted] = index_.emplace(cases_[i].case_id, i);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateCaseId, "case_id '" + cases_[i].case_id + "' used by " +
                                                  cases_[it->second].source_path.string() + " and " +
                                                  cases_[i].source_path.string());
    }
  }
}

const CaseDocument* CaseCorpus::find(std::string_view case_id) const {
  const auto it = index_.find(std::string(case_id));
  return it == index_.end() ? nullptr : &cases_[it->second];
}

const CaseDocument& get_case(const CaseCorpus& corpus, std::string_view case_id) {
  if (const auto* doc = corpus.find(case_id)) return *doc;
  throw Error(ErrorCode::CaseNotFound, std::string(case_id));
}

bool is_valid_case_id(std::string_view case_id) {
  if (case_id.empty() || case_id == "." || case_id == "..") return false;
  return std::none_of(case_id.begin(), case_id.end(), [](char c) {
    return c == '/' || c == '\\' || static_cast<unsigned char>(c) < 0x20;
  });
}

namespace {

struct ManifestEntry {
  std::string case_id;
  std::string jurisdiction;
};

std::map<std::string, ManifestEntry> load_manifest(const fs::path& path) {
  const auto raw = fsutil::read_file(path);
  if (!raw) throw Error(ErrorCode::ManifestError, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(*raw);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ManifestError, "manifest must be a JSON array");
  std::map<std::string, ManifestEntry> entries;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("file") || !item["file"].is_string()) {
      throw Error(ErrorCode::ManifestError, "manifest entry without a \"file\" string");
    }
    ManifestEntry entry;
    if (item.contains("case_id") && item["case_id"].is_string()) entry.case_id = item["case_id"];
    if (item.contains("jurisdiction") && item["jurisdiction"].is_string()) entry.jurisdiction = item["jurisdiction"];
    entries[item["file"].get<std::string>()] = std::move(entry);
  }
  return entries;
}

}  // namespace

IngestResult ingest_cases(const fs::path& root, const std::optional<fs::path>& manifest) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::MissingRoot, root.string());

  std::map<std::string, ManifestEntry> entries;
  if (manifest) entries = load_manifest(*manifest);

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".txt") files.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::MissingRoot, root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });

  IngestResult result;
  std::vector<CaseDocument> docs;
  for (const auto& path : files) {
    auto bytes = fsutil::read_file(path);
    if (!bytes) {
      result.skipped.push_back({path, "unreadable"});
      continue;
    }
    if (!text::is_valid_utf8(*bytes)) {
      result.skipped.push_back({path, "not valid UTF-8 text"});
      continue;
    }
    if (text::trim(*bytes).empty()) {
      result.skipped.push_back({path, "blank opinion text"});
      continue;
    }
    CaseDocument doc;
    doc.case_id = path.stem().string();
    doc.jurisdiction = std::string(kUnknownJurisdiction);
    const std::string rel = path.lexically_relative(root).generic_string();
    auto entry = entries.find(rel);
    if (entry == entries.end()) entry = entries.find(path.filename().string());
    if (entry != entries.end()) {
      if (!entry->second.case_id.empty()) doc.case_id = entry->second.case_id;
      if (!entry->second.jurisdiction.empty()) doc.jurisdiction = entry->second.jurisdiction;
    }
    if (!is_valid_case_id(doc.case_id)) {
      throw Error(ErrorCode::InvalidCaseId, "'" + doc.case_id + "' from " + path.string());
    }
    doc.opinion_text = std::move(*bytes);
    doc.source_path = path;
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no readable cases under " + root.string());
  result.corpus = CaseCorpus(std::move(docs));
  return result;
}

CaseCorpus sample_by_jurisdiction(const CaseCorpus& corpus, std::size_t per_jurisdiction, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> strata;
  const auto cases = corpus.cases();
  for (std::size_t i = 0; i < cases.size(); ++i) strata[cases[i].jurisdiction].push_back(i);

  std::vector<bool> keep(cases.size(), false);
  for (auto& [jurisdiction, members] : strata) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return cases[a].case_id < cases[b].case_id; });
    const std::string digest = sha256_hex(std::to_string(seed) + '\x1f' + jurisdiction);
    StableRng rng(std::stoull(digest.substr(0, 16), nullptr, 16));
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t take = std::min(per_jurisdiction, members.size());
    for (std::size_t k = 0; k < take; ++k) keep[members[k]] = true;
  }

  std::vector<CaseDocument> selected;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (keep[i]) selected.push_back(cases[i]);
  }
  return CaseCorpus(std::move(selected));
}

nlohmann::ordered_json corpus_index_json(const CaseCorpus& corpus, std::span<const SkippedFile> skipped) {
  nlohmann::ordered_json out;
  out["cases"] = nlohmann::ordered_json::array();
  for (const auto& doc : corpus.cases()) {
    out["cases"].push_back({{"case_id", doc.case_id},
                            {"jurisdiction", doc.jurisdiction},
                            {"source_path", doc.source_path.generic_string()},
                            {"sha256", sha256_hex(doc.opinion_text)}});
  }
  out["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : skipped) {
    out["skipped"].push_back({{"path", s.path.generic_string()}, {"reason", s.reason}});
  }
  return out;
}

CaseCorpus load_corpus_index(const fs::path& index_file) {
  const auto raw = fsutil::read_file(index_file);
  if (!raw) throw Error(ErrorCode::IoError, "cannot read " + index_file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(*raw);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, index_file.string() + ": " + e.what());
  }
  std::vector<CaseDocument> docs;
  try {
    for (const auto& item : doc.at("cases")) {
      CaseDocument d;
      d.case_id = item.at("case_id").get<std::string>();
      d.jurisdiction = item.at("jurisdiction").get<std::string>();
      d.source_path = item.at("source_path").get<std::string>();
      auto text = fsutil::read_file(d.source_path);
      if (!text) throw Error(ErrorCode::IoError, "cannot read " + d.source_path.string());
      if (item.contains("sha256") && sha256_hex(*text) != item["sha256"].get<std::string>()) {
        throw Error(ErrorCode::IoError, d.source_path.string() + " changed since it was indexed");
      }
      d.opinion_text = std::move(*text);
      docs.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, index_file.string() + ": " + e.what());
  }
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, index_file.string());
  return CaseCorpus(std::move(docs));
}

}  // namespace irac
