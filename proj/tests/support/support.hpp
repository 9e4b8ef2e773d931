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

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "irac/graph_query.hpp"
#include "irac/kg.hpp"
#include "irac/llm.hpp"

namespace irac_test {

namespace fs = std::filesystem;

fs::path source_dir();
fs::path fixtures_dir();
fs::path golden_dir();

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Restores the working directory on destruction.
class ScopedCwd {
 public:
  explicit ScopedCwd(const fs::path& dir);
  ~ScopedCwd();

 private:
  fs::path previous_;
};

// FIXTURE-A built by hand: F1,F2 facts; I1 issue; R1,R2,R3 rules; C1
// conclusion; P1 cited case. R3 touches nothing.
irac::IracGraph fixture_a();

// Labels used by fixture_a(), keyed by id; they match the recorded
// extraction completion for the case.
std::string fixture_a_label(std::string_view id);

// Backend driven by a callback; counts calls and tracks peak concurrency.
class ScriptedBackend : public irac::llm::LlmBackend {
 public:
  using Script = std::function<irac::llm::LlmResponse(const irac::llm::LlmRequest&)>;
  explicit ScriptedBackend(Script script) : script_(std::move(script)) {}
  irac::llm::LlmResponse complete(const irac::llm::LlmRequest& request) override;

  int calls() const { return calls_.load(); }
  int peak_in_flight() const { return peak_.load(); }
  std::vector<irac::llm::LlmRequest> requests() const;

 private:
  Script script_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  mutable std::mutex mutex_;
  std::vector<irac::llm::LlmRequest> requests_;
};

irac::llm::LlmResponse text_response(std::string text);

// Gateway without real sleeps.
irac::llm::GatewayOptions fast_gateway_options(std::size_t max_in_flight = 4);

// ---------------------------------------------------------------------------
// Random graphs

// Endpoint table written out independently of the library, by wire names.
struct WireRule {
  std::string relation;
  std::vector<std::string> sources;
  std::vector<std::string> targets;
};
const std::vector<WireRule>& wire_endpoint_table();
const std::vector<std::string>& wire_entity_kinds();

// Valid graph with up to max_entities entities. Ids mix prefixes and widths
// so byte order differs from insertion order; labels are unique and carry
// quotes, backslashes, newlines, non-ASCII text and markup characters.
irac::IracGraph random_graph(std::mt19937_64& rng, std::size_t max_entities = 50);

// ---------------------------------------------------------------------------
// Brute-force oracles: a linear scan of every relation, no indexes.

using IdSet = std::set<std::string>;

IdSet ids_of(const irac::EntitySet& set);
std::string kind_name(const irac::IracGraph& g, const std::string& id);

IdSet oracle_facts(const irac::IracGraph& g, const std::string& issue);
IdSet oracle_rules_via_apply(const irac::IracGraph& g, const std::string& fact);
IdSet oracle_rules_via_address(const irac::IracGraph& g, const std::string& issue);
IdSet oracle_applicable(const irac::IracGraph& g, const std::string& issue);
IdSet oracle_all_rules(const irac::IracGraph& g);
IdSet oracle_candidates(const irac::IracGraph& g, const std::string& issue);
std::vector<std::string> ids_of_kind(const irac::IracGraph& g, std::string_view kind);

}  // namespace irac_test
