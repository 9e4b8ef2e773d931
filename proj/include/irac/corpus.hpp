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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace irac {

inline constexpr std::string_view kUnknownJurisdiction = "unknown";

struct CaseDocument {
  std::string case_id;
  std::string jurisdiction;
  std::string opinion_text;
  std::filesystem::path source_path;
};

// Ordered, immutable collection of cases with an id index. Ids are
// case-sensitive and unique.
class CaseCorpus {
 public:
  CaseCorpus() = default;
  // Throws DuplicateCaseId.
  explicit CaseCorpus(std::vector<CaseDocument> cases);

  std::span<const CaseDocument> cases() const { return cases_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }

  const CaseDocument* find(std::string_view case_id) const;

 private:
  std::vector<CaseDocument> cases_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct IngestResult {
  CaseCorpus corpus;
  std::vector<SkippedFile> skipped;
};

// Loads every <root>/**/*.txt file in relative-path order. Files that are not
// valid UTF-8, or are blank after trimming, are skipped and reported. The
// manifest, when given, is a JSON array of {"file","case_id","jurisdiction"};
// "file" matches either the path relative to root or the bare filename.
// Throws MissingRoot, EmptyCorpus, DuplicateCaseId, InvalidCaseId, ManifestError.
IngestResult ingest_cases(const std::filesystem::path& root,
                          const std::optional<std::filesystem::path>& manifest = std::nullopt);

// Stratified sample: per jurisdiction, min(per_jurisdiction, stratum size)
// cases drawn uniformly without replacement. Each stratum has its own
// StableRng seeded from sha256(seed, jurisdiction), and stratum members are
// ordered by case_id before shuffling, so the draw depends only on the
// corpus contents and the seed. The result keeps the input corpus order.
CaseCorpus sample_by_jurisdiction(const CaseCorpus& corpus, std::size_t per_jurisdiction, std::uint64_t seed);

// Throws CaseNotFound.
const CaseDocument& get_case(const CaseCorpus& corpus, std::string_view case_id);

// True for ids usable as a file stem: non-empty, no path separators or
// control characters, not "." or "..".
bool is_valid_case_id(std::string_view case_id);

// On-disk corpus index written by `irac ingest` / `irac sample`. Holds ids,
// jurisdictions, source paths and text digests, not the texts themselves.
nlohmann::ordered_json corpus_index_json(const CaseCorpus& corpus, std::span<const SkippedFile> skipped = {});

// Re-reads each indexed source file and checks its digest (IoError on drift).
CaseCorpus load_corpus_index(const std::filesystem::path& index_file);

}  // namespace irac
