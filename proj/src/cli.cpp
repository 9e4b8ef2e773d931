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

#include "irac/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "irac/corpus.hpp"
#include "irac/dataset.hpp"
#include "irac/errors.hpp"
#include "irac/extraction.hpp"
#include "irac/fsutil.hpp"
#include "irac/hashing.hpp"
#include "irac/kg.hpp"
#include "irac/llm.hpp"
#include "irac/llm_http.hpp"
#include "irac/pref.hpp"
#include "irac/review.hpp"
#include "irac/review_http.hpp"
#include "irac/sft.hpp"

namespace irac::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "irac 0.1.0";
constexpr const char* kManifestName = "run-manifest.json";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every flag of every subcommand lands here; the config file fills whatever
// the command line left unset.
struct PipelineConfig {
  std::string root;
  std::string manifest;
  std::string corpus;
  std::string out;
  std::string kg_dir;
  std::string input;
  std::string sft;
  std::string store;
  std::string run_manifest;

  std::string gateway;
  std::string fixtures;
  std::string cache;
  std::string model = std::string(llm::kDefaultModelTag);
  std::string api_url = llm::HttpBackendOptions{}.base_url;
  std::string api_key_env = llm::kDefaultApiKeyEnv;
  std::size_t max_in_flight = 4;
  std::optional<int> max_output;
  std::size_t jobs = 1;

  std::uint64_t seed = 0;
  std::size_t per_jurisdiction = 1;
  std::string ratio = "10:1";
  std::size_t opinion_budget = kDefaultOpinionBudget;
  bool pairwise = false;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token_env = "IRAC_REVIEW_TOKEN";

  std::string prompt_file;
  std::string response_file;
  std::string finish = "complete";
  double temperature = 0.0;
};

// Reads the --config file: {"defaults": {...}, "<subcommand>": {...}}.
// Keys are long flag names without dashes. Section values win over
// "defaults"; command-line flags win over both.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    std::stringstream buf;
    buf << in.rdbuf();
    const auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw CLI::ConfigError("config file is not a JSON object");

    std::vector<CLI::ConfigItem> items;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() == "defaults") continue;
      if (!it->is_object()) throw CLI::ConfigError("config section \"" + it.key() + "\" must be an object");
      for (auto kv = it->begin(); kv != it->end(); ++kv) add(items, {it.key()}, kv.key(), *kv);
    }
    if (auto defaults = doc.find("defaults"); defaults != doc.end()) {
      if (!defaults->is_object()) throw CLI::ConfigError("config section \"defaults\" must be an object");
      const auto subs = root_->get_subcommands([](const CLI::App*) { return true; });
      for (const CLI::App* sub : subs) {
        for (auto kv = defaults->begin(); kv != defaults->end(); ++kv) {
          if (sub->get_option_no_throw("--" + kv.key())) add(items, {sub->get_name()}, kv.key(), *kv);
        }
      }
    }
    return items;
  }

 private:
  static void add(std::vector<CLI::ConfigItem>& items, std::vector<std::string> parents, const std::string& name,
                  const nlohmann::json& value) {
    CLI::ConfigItem item;
    item.parents = std::move(parents);
    item.name = name;
    auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_null()) return;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar(v));
    } else {
      item.inputs.push_back(scalar(value));
    }
    items.push_back(std::move(item));
  }

  const CLI::App* root_;
};

// ---- run manifests -------------------------------------------------------

void digest_into(json& map, const std::string& given) {
  if (given.empty()) return;
  const fs::path p(given);
  std::error_code ec;
  if (fs::is_regular_file(p, ec)) {
    const auto raw = fsutil::read_file(p);
    if (!raw) throw Error(ErrorCode::IoError, "cannot read " + given);
    map[p.generic_string()] = sha256_hex(*raw);
    return;
  }
  if (!fs::is_directory(p, ec)) return;
  std::vector<std::string> files;
  for (auto it = fs::recursive_directory_iterator(p, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const std::string rel = it->path().lexically_relative(p).generic_string();
    if (rel == kManifestName || it->path().filename().string().find(".tmp.") != std::string::npos) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  for (const auto& rel : files) {
    const fs::path file = p / rel;
    const auto raw = fsutil::read_file(file);
    if (!raw) throw Error(ErrorCode::IoError, "cannot read " + file.string());
    map[file.generic_string()] = sha256_hex(*raw);
  }
}

// Effective option values of the subcommand, by long name.
json effective_config(const CLI::App& sub) {
  json config = json::object();
  config["command"] = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const auto& results = opt->results();
    if (results.empty()) {
      config[name] = opt->get_default_str();
    } else if (results.size() == 1) {
      config[name] = results.front();
    } else {
      config[name] = results;
    }
  }
  return config;
}

struct RunRecord {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json summary = json::object();
};

void write_manifest(const fs::path& path, const CLI::App& sub, const std::string& config_file, const RunRecord& run) {
  json manifest;
  manifest["tool"] = kToolVersion;
  manifest["config"] = effective_config(sub);
  json inputs = json::object();
  digest_into(inputs, config_file);
  for (const auto& p : run.inputs) digest_into(inputs, p);
  json outputs = json::object();
  for (const auto& p : run.outputs) digest_into(outputs, p);
  manifest["inputs"] = std::move(inputs);
  manifest["outputs"] = std::move(outputs);
  manifest["summary"] = run.summary;
  fsutil::atomic_write(path, manifest.dump(2) + "\n");
}

// ---- shared helpers ------------------------------------------------------

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required option --") + flag);
}

std::unique_ptr<llm::Gateway> make_gateway(const PipelineConfig& c) {
  if (c.gateway.empty()) throw UsageError("no gateway configured: pass --gateway replay|live");
  std::shared_ptr<llm::LlmBackend> backend;
  if (c.gateway == "replay") {
    if (c.fixtures.empty()) throw UsageError("--gateway replay needs --fixtures");
    backend = std::make_shared<llm::ReplayBackend>(c.fixtures);
  } else if (c.gateway == "live") {
    llm::HttpBackendOptions http;
    http.base_url = c.api_url;
    http.api_key_env = c.api_key_env;
    backend = std::make_shared<llm::HttpBackend>(http);
    if (!c.cache.empty()) backend = std::make_shared<llm::CachingBackend>(backend, c.cache);
  } else {
    throw UsageError("unknown gateway \"" + c.gateway + "\" (expected replay or live)");
  }
  llm::GatewayOptions options;
  options.max_in_flight = std::max<std::size_t>(1, c.max_in_flight);
  return std::make_unique<llm::Gateway>(backend, options);
}

void add_gateway_flags(CLI::App* sub, PipelineConfig& c) {
  sub->add_option("--gateway", c.gateway, "LLM backend: replay (recorded fixtures) or live (HTTP)");
  sub->add_option("--fixtures", c.fixtures, "Fixture store for --gateway replay");
  sub->add_option("--cache", c.cache, "Response cache directory for --gateway live");
  sub->add_option("--model", c.model, "Model tag sent with every request");
  sub->add_option("--max-output", c.max_output, "Completion token budget per request");
  sub->add_option("--max-in-flight", c.max_in_flight, "Concurrent backend calls");
  sub->add_option("--api-url", c.api_url, "OpenAI-compatible base URL for --gateway live");
  sub->add_option("--api-key-env", c.api_key_env, "Environment variable holding the API key");
  sub->add_option("--jobs", c.jobs, "Worker threads");
}

std::pair<int, int> parse_ratio(const std::string& ratio) {
  const auto colon = ratio.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(ratio);
    std::size_t used = 0;
    const int a = std::stoi(ratio.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(ratio);
    const std::string rest = ratio.substr(colon + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size() || a < 1 || b < 1) throw std::invalid_argument(ratio);
    return {a, b};
  } catch (const std::exception&) {
    throw UsageError("--ratio must look like 10:1 with positive parts, got \"" + ratio + "\"");
  }
}

void emit_json(std::ostream& os, const json& j) { os << j.dump(2) << "\n"; }

json sft_summary_json(const SftSummary& s) {
  return {{"records", s.records},
          {"skipped_no_facts", s.skipped_no_facts},
          {"skipped_no_rules", s.skipped_no_rules},
          {"echo_failures", s.echo_failures},
          {"malformed_outputs", s.malformed_outputs},
          {"llm_failures", s.llm_failures}};
}

json pref_summary_json(const PrefSummary& s) {
  return {{"records", s.records},
          {"skipped", s.skipped},
          {"judge_failures", s.judge_failures},
          {"llm_failures", s.llm_failures},
          {"lines", s.lines}};
}

// ---- commands ------------------------------------------------------------

RunRecord cmd_ingest(const PipelineConfig& c) {
  require(c.root, "root");
  require(c.out, "out");
  const IngestResult result =
      ingest_cases(c.root, c.manifest.empty() ? std::nullopt : std::optional<fs::path>(c.manifest));
  const fs::path index = fs::path(c.out) / "corpus.json";
  fsutil::atomic_write(index, corpus_index_json(result.corpus, result.skipped).dump(2) + "\n");
  RunRecord run;
  run.inputs = {c.root, c.manifest};
  run.outputs = {c.out};
  run.summary = {{"cases", result.corpus.size()}, {"skipped", result.skipped.size()}};
  return run;
}

RunRecord cmd_sample(const PipelineConfig& c) {
  require(c.corpus, "corpus");
  require(c.out, "out");
  const CaseCorpus corpus = load_corpus_index(c.corpus);
  const CaseCorpus sample = sample_by_jurisdiction(corpus, c.per_jurisdiction, c.seed);
  fsutil::atomic_write(fs::path(c.out) / "corpus.json", corpus_index_json(sample).dump(2) + "\n");
  RunRecord run;
  run.inputs = {c.corpus};
  run.outputs = {c.out};
  run.summary = {{"cases", sample.size()}, {"from", corpus.size()}};
  return run;
}

RunRecord cmd_extract(const PipelineConfig& c) {
  auto gateway = make_gateway(c);
  require(c.corpus, "corpus");
  require(c.out, "out");
  const CaseCorpus corpus = load_corpus_index(c.corpus);
  ExtractionOptions options;
  options.model_tag = c.model;
  if (c.max_output) options.max_output = *c.max_output;
  options.opinion_budget = c.opinion_budget;
  const ExtractionSummary s = run_extraction(corpus, *gateway, c.out, options, c.jobs);
  RunRecord run;
  run.inputs = {c.corpus, c.fixtures};
  run.outputs = {c.out};
  run.summary = {{"ok", s.ok}, {"ok_with_drops", s.ok_with_drops}, {"quarantined", s.quarantined}, {"reused", s.reused}};
  return run;
}

// Returns true when every graph is clean.
bool cmd_validate(const PipelineConfig& c, RunRecord& run) {
  require(c.kg_dir, "kg-dir");
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(c.kg_dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + c.kg_dir);
  for (const auto& entry : fs::directory_iterator(c.kg_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 8 && name.ends_with(".kg.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  json graphs = json::array();
  std::size_t invalid = 0;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const std::string case_id = name.substr(0, name.size() - 8);
    json entry;
    entry["file"] = path.generic_string();
    entry["case_id"] = case_id;
    json violations = json::array();
    const auto raw = fsutil::read_file(path);
    if (!raw) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    try {
      ParseOptions options;
      options.mode = ParseMode::Strict;
      const ParsedGraph parsed = parse_graph_json(*raw, case_id, options);
      for (const auto& v : parsed.report.violations) {
        violations.push_back({{"code", to_string(v.code)}, {"subject_id", v.subject_id}, {"message", v.message}});
      }
    } catch (const Error& e) {
      violations.push_back({{"code", to_string(e.code())}, {"subject_id", ""}, {"message", e.what()}});
    }
    entry["valid"] = violations.empty();
    entry["violations"] = std::move(violations);
    if (!entry["valid"].get<bool>()) ++invalid;
    graphs.push_back(std::move(entry));
  }
  run.inputs = {c.kg_dir};
  run.summary = {{"graphs", files.size()}, {"invalid", invalid}, {"results", graphs}};
  return invalid == 0;
}

RunRecord cmd_gen_sft(const PipelineConfig& c) {
  auto gateway = make_gateway(c);
  require(c.kg_dir, "kg-dir");
  require(c.out, "out");
  const auto graphs = load_graphs(c.kg_dir);
  SftOptions options;
  options.model_tag = c.model;
  if (c.max_output) options.max_output = *c.max_output;
  const SftSummary s = run_sft_generation(graphs, *gateway, c.out, options, c.jobs);
  RunRecord run;
  run.inputs = {c.kg_dir, c.fixtures};
  run.outputs = {c.out};
  run.summary = sft_summary_json(s);
  return run;
}

RunRecord cmd_gen_pref(const PipelineConfig& c) {
  auto gateway = make_gateway(c);
  require(c.kg_dir, "kg-dir");
  require(c.out, "out");
  const auto graphs = load_graphs(c.kg_dir);
  PrefOptions options;
  options.model_tag = c.model;
  if (c.max_output) options.max_output = *c.max_output;
  options.pairwise = c.pairwise;
  const PrefSummary s = run_pref_generation(graphs, *gateway, c.out, options, c.jobs);
  RunRecord run;
  run.inputs = {c.kg_dir, c.fixtures};
  run.outputs = {c.out};
  run.summary = pref_summary_json(s);
  return run;
}

RunRecord cmd_split(const PipelineConfig& c, std::ostream& err) {
  require(c.input, "input");
  require(c.out, "out");
  const auto [train_parts, val_parts] = parse_ratio(c.ratio);
  const auto records = read_jsonl(c.input);
  SplitSpec spec{train_parts, val_parts, c.seed};
  const SplitResult split = split_train_val(records, spec);
  write_jsonl(split.train, fs::path(c.out) / "train.jsonl");
  write_jsonl(split.val, fs::path(c.out) / "val.jsonl");
  for (const auto& w : split.warnings) err << "warning: " << w << "\n";
  RunRecord run;
  run.inputs = {c.input};
  run.outputs = {c.out};
  run.summary = {{"train_records", split.train.size()}, {"val_records", split.val.size()},
                 {"train_cases", split.train_cases},    {"val_cases", split.val_cases},
                 {"warnings", split.warnings}};
  return run;
}

RunRecord cmd_stats(const PipelineConfig& c) {
  require(c.input, "input");
  const auto records = read_jsonl(c.input);
  RunRecord run;
  run.inputs = {c.input};
  run.summary = dataset_stats(records).to_json();
  return run;
}

std::vector<review::RecordForReview> review_records(const std::string& path) {
  std::vector<review::RecordForReview> out;
  if (path.empty()) return out;
  for (const auto& r : read_jsonl(path)) {
    review::RecordForReview rec;
    rec.case_id = record_case_id(r);
    if (auto meta = r.find("meta"); meta != r.end() && meta->contains("record_id")) {
      rec.record_id = (*meta)["record_id"].get<std::string>();
    }
    if (rec.case_id.empty() || rec.record_id.empty()) continue;
    rec.text = r.value("user", std::string()) + "\n\n" + r.value("assistant", std::string());
    out.push_back(std::move(rec));
  }
  return out;
}

int cmd_review_serve(const PipelineConfig& c, const CLI::App& sub, const std::string& config_file,
                     std::ostream& out) {
  require(c.kg_dir, "kg-dir");
  require(c.store, "store");
  auto graphs = load_graphs(c.kg_dir);
  auto records = review_records(c.sft);
  review::ReviewStore store(fs::path(c.store));
  review::ServerOptions options;
  options.host = c.host;
  options.port = c.port;
  if (const char* token = std::getenv(c.token_env.c_str())) options.token = token;

  RunRecord run;
  run.inputs = {c.kg_dir, c.sft};
  run.summary = {{"graphs", graphs.size()}, {"records", records.size()}, {"auth", !options.token.empty()}};
  write_manifest(c.run_manifest.empty() ? fs::path(c.store) / kManifestName : fs::path(c.run_manifest), sub,
                 config_file, run);

  review::ReviewServer server(store, std::move(graphs), std::move(records), options);
  out << json{{"listening", c.host + ":" + std::to_string(c.port)}, {"auth", !options.token.empty()}}.dump() << "\n";
  out.flush();
  if (!server.listen()) throw Error(ErrorCode::IoError, "cannot listen on " + c.host + ":" + std::to_string(c.port));
  return kExitOk;
}

RunRecord cmd_record_fixture(const PipelineConfig& c) {
  require(c.fixtures, "fixtures");
  require(c.prompt_file, "prompt-file");
  require(c.response_file, "response-file");
  const auto prompt = fsutil::read_file(c.prompt_file);
  if (!prompt) throw Error(ErrorCode::IoError, "cannot read " + c.prompt_file);
  const auto text = fsutil::read_file(c.response_file);
  if (!text) throw Error(ErrorCode::IoError, "cannot read " + c.response_file);
  llm::FinishState finish;
  if (c.finish == "complete") {
    finish = llm::FinishState::Complete;
  } else if (c.finish == "truncated") {
    finish = llm::FinishState::Truncated;
  } else if (c.finish == "refused") {
    finish = llm::FinishState::Refused;
  } else {
    throw UsageError("--finish must be complete, truncated or refused");
  }
  llm::LlmRequest request{*prompt, c.model, c.temperature, c.max_output.value_or(4096)};
  const std::string key =
      llm::record_fixture(request, llm::make_response(*text, finish, llm::Provenance::Replay), c.fixtures);
  RunRecord run;
  run.inputs = {c.prompt_file, c.response_file};
  run.summary = {{"key", key}};
  return run;
}

void print_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  PipelineConfig c;
  CLI::App app{"Builds IRAC knowledge graphs from case opinions and turns them into SFT and DPO datasets.", "irac"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  CLI::Option* config_opt = app.set_config("--config", "", "JSON config file; command-line flags override it");
  app.set_version_flag("--version", kToolVersion);

  auto* ingest = app.add_subcommand("ingest", "Index a directory of case opinions (*.txt)");
  ingest->add_option("--root", c.root, "Corpus root directory");
  ingest->add_option("--manifest", c.manifest, "JSON array of {file, case_id, jurisdiction}");
  ingest->add_option("--out", c.out, "Output directory (corpus.json)");

  auto* sample = app.add_subcommand("sample", "Stratified sample of an indexed corpus by jurisdiction");
  sample->add_option("--corpus", c.corpus, "corpus.json written by ingest");
  sample->add_option("--per-jurisdiction", c.per_jurisdiction, "Cases drawn per jurisdiction");
  sample->add_option("--seed", c.seed, "Sampling seed");
  sample->add_option("--out", c.out, "Output directory (corpus.json)");

  auto* extract = app.add_subcommand("extract", "Extract one IRAC graph per case with the LLM");
  extract->add_option("--corpus", c.corpus, "corpus.json written by ingest or sample");
  extract->add_option("--out", c.out, "Output directory for graphs, outcomes and quarantine");
  extract->add_option("--opinion-budget", c.opinion_budget, "Maximum opinion bytes placed in the prompt");
  add_gateway_flags(extract, c);

  auto* validate = app.add_subcommand("validate", "Check stored graphs against the IRAC schema");
  validate->add_option("--kg-dir", c.kg_dir, "Directory of <case>.kg.json files");
  validate->add_option("--out", c.out, "Write the report to this file instead of standard output");

  auto* gen_sft = app.add_subcommand("gen-sft", "Generate SFT chat records, one per legal issue");
  gen_sft->add_option("--kg-dir", c.kg_dir, "Directory of <case>.kg.json files");
  gen_sft->add_option("--out", c.out, "Output directory (sft.jsonl)");
  add_gateway_flags(gen_sft, c);

  auto* gen_pref = app.add_subcommand("gen-pref", "Generate DPO preference records with the rule judge");
  gen_pref->add_option("--kg-dir", c.kg_dir, "Directory of <case>.kg.json files");
  gen_pref->add_option("--out", c.out, "Output directory (dpo.jsonl)");
  gen_pref->add_flag("--pairwise", c.pairwise, "One record per (chosen, rejected) rule pair");
  add_gateway_flags(gen_pref, c);

  auto* split = app.add_subcommand("split", "Case-level train/validation split of a JSONL dataset");
  split->add_option("--input", c.input, "JSONL dataset");
  split->add_option("--out", c.out, "Output directory (train.jsonl, val.jsonl)");
  split->add_option("--ratio", c.ratio, "train:validation case ratio");
  split->add_option("--seed", c.seed, "Shuffle seed");

  auto* stats = app.add_subcommand("stats", "Summary statistics of a JSONL dataset");
  stats->add_option("--input", c.input, "JSONL dataset");
  stats->add_option("--out", c.out, "Write the report to this file instead of standard output");

  auto* serve = app.add_subcommand("review-serve", "Serve the review HTTP API");
  serve->add_option("--kg-dir", c.kg_dir, "Directory of <case>.kg.json files");
  serve->add_option("--sft", c.sft, "sft.jsonl whose records can be added to batches");
  serve->add_option("--store", c.store, "Directory holding review batches");
  serve->add_option("--host", c.host, "Listen address");
  serve->add_option("--port", c.port, "Listen port");
  serve->add_option("--token-env", c.token_env, "Environment variable holding the bearer token");

  auto* fixture = app.add_subcommand("record-fixture", "Store a prompt/completion pair for --gateway replay");
  fixture->add_option("--fixtures", c.fixtures, "Fixture store directory");
  fixture->add_option("--prompt-file", c.prompt_file, "Exact prompt text");
  fixture->add_option("--response-file", c.response_file, "Completion text to replay");
  fixture->add_option("--model", c.model, "Model tag of the request");
  fixture->add_option("--temperature", c.temperature, "Temperature of the request");
  fixture->add_option("--max-output", c.max_output, "Completion budget of the request");
  fixture->add_option("--finish", c.finish, "complete, truncated or refused");

  for (auto* sub : {ingest, sample, extract, validate, gen_sft, gen_pref, split, stats, serve, fixture}) {
    sub->add_option("--run-manifest", c.run_manifest, "Where to write the run manifest");
  }

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "UsageError", e.what());
    err << app.help();
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string config_file = config_opt->count() ? config_opt->as<std::string>() : std::string();
  auto manifest_at = [&](const std::string& fallback_dir) -> std::optional<fs::path> {
    if (!c.run_manifest.empty()) return fs::path(c.run_manifest);
    if (!fallback_dir.empty()) return fs::path(fallback_dir) / kManifestName;
    return std::nullopt;
  };
  // Report-style commands have no output directory; their manifest sits next
  // to the --out file, or is skipped when the report goes to stdout.
  auto report_manifest = [&]() -> std::optional<fs::path> {
    if (!c.run_manifest.empty()) return fs::path(c.run_manifest);
    if (!c.out.empty()) return fs::path(c.out + ".run-manifest.json");
    return std::nullopt;
  };

  try {
    RunRecord run;
    int code = kExitOk;
    std::optional<fs::path> manifest;
    const std::string& name = sub->get_name();
    if (name == "ingest") {
      run = cmd_ingest(c);
      manifest = manifest_at(c.out);
    } else if (name == "sample") {
      run = cmd_sample(c);
      manifest = manifest_at(c.out);
    } else if (name == "extract") {
      run = cmd_extract(c);
      manifest = manifest_at(c.out);
    } else if (name == "validate") {
      code = cmd_validate(c, run) ? kExitOk : kExitDataError;
      if (!c.out.empty()) {
        fsutil::atomic_write(c.out, run.summary.dump(2) + "\n");
        run.outputs = {c.out};
      }
      manifest = report_manifest();
    } else if (name == "gen-sft") {
      run = cmd_gen_sft(c);
      manifest = manifest_at(c.out);
    } else if (name == "gen-pref") {
      run = cmd_gen_pref(c);
      manifest = manifest_at(c.out);
    } else if (name == "split") {
      run = cmd_split(c, err);
      manifest = manifest_at(c.out);
    } else if (name == "stats") {
      run = cmd_stats(c);
      if (!c.out.empty()) {
        fsutil::atomic_write(c.out, run.summary.dump(2) + "\n");
        run.outputs = {c.out};
      }
      manifest = report_manifest();
    } else if (name == "review-serve") {
      return cmd_review_serve(c, *sub, config_file, out);
    } else if (name == "record-fixture") {
      run = cmd_record_fixture(c);
      if (!c.run_manifest.empty()) manifest = fs::path(c.run_manifest);
    }
    if (manifest) write_manifest(*manifest, *sub, config_file, run);
    const bool report_to_file = (name == "validate" || name == "stats") && !c.out.empty();
    if (!report_to_file) emit_json(out, run.summary);
    return code;
  } catch (const UsageError& e) {
    print_error(err, "UsageError", e.what());
    err << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return kExitDataError;
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
    return kExitDataError;
  }
}

}  // namespace irac::cli
