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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "irac/extraction.hpp"
#include "irac/hashing.hpp"
#include "irac/prompts.hpp"
#include "support.hpp"

using namespace irac;
using irac_test::read_text;
using irac_test::ScriptedBackend;
using irac_test::TempDir;

namespace fs = std::filesystem;

namespace {

const char* kValid =
    R"({"vertices_":[{"id_":"I1","type_":"LegalIssue","label_":"Whether X"},)"
    R"({"id_":"F1","type_":"MaterialFact","label_":"X happened"}],)"
    R"("relations_":[{"id_":"REL1","type_":"ARISES_FROM","from_":"I1","to_":"F1"}]})";

const char* kOneBreach =
    R"({"vertices_":[{"id_":"I1","type_":"LegalIssue","label_":"Whether X"},)"
    R"({"id_":"F1","type_":"MaterialFact","label_":"X happened"},{"id_":"R1","type_":"Rule","label_":"A rule"}],)"
    R"("relations_":[{"id_":"REL1","type_":"ARISES_FROM","from_":"I1","to_":"F1"},)"
    R"({"id_":"REL2","type_":"LEADS_TO","from_":"R1","to_":"F1"}]})";

// Answers by the opinion text embedded in the prompt.
std::shared_ptr<ScriptedBackend> by_opinion(std::map<std::string, std::string> answers) {
  return std::make_shared<ScriptedBackend>([answers](const llm::LlmRequest& r) {
    for (const auto& [needle, answer] : answers) {
      if (r.prompt.find(needle) != std::string::npos) return irac_test::text_response(answer);
    }
    throw Error(ErrorCode::BackendUnavailable, "unscripted prompt");
  });
}

CaseDocument doc(std::string id, std::string text) { return {std::move(id), "unknown", std::move(text), {}}; }

}  // namespace

TEST(KgPrompt, SubstitutesOpinionBetweenDelimiters) {
  const auto p = render_kg_prompt(doc("c", "X v. Y ..."));
  EXPECT_NE(p.text.find("<legal_case>\nX v. Y ...\n</legal_case>"), std::string::npos);
  EXPECT_FALSE(p.truncated);
  // Nothing but the placeholder changes.
  std::string expected(prompts::kg_extraction_template());
  expected.replace(expected.find("{case_opinion}"), std::string_view("{case_opinion}").size(), "X v. Y ...");
  EXPECT_EQ(p.text, expected);
}

TEST(KgPrompt, MatchesGoldenFiles) {
  for (const std::string id : {"FIXTURE-A", "FIXTURE-B"}) {
    const std::string opinion = read_text(irac_test::fixtures_dir() / "corpus" / (id + ".txt"));
    EXPECT_EQ(render_kg_prompt(doc(id, opinion)).text, read_text(irac_test::golden_dir() / (id + ".kg_prompt.txt")))
        << id;
  }
}

TEST(KgPrompt, PlaceholderLikeTextInOpinionIsNotExpanded) {
  const auto p = render_kg_prompt(doc("c", "the {case_opinion} token"));
  EXPECT_NE(p.text.find("<legal_case>\nthe {case_opinion} token\n</legal_case>"), std::string::npos);
}

TEST(Truncation, CutsAtParagraphBoundaryWithinBudget) {
  std::string opinion;
  for (int i = 0; i < 40; ++i) opinion += "Paragraph " + std::to_string(i) + " " + std::string(90, 'x') + ".\n\n";
  const std::size_t budget = 1000;
  bool truncated = false;
  const std::string kept = truncate_opinion(opinion, budget, &truncated);
  EXPECT_TRUE(truncated);
  EXPECT_LE(kept.size(), budget);
  EXPECT_EQ(opinion.rfind(kept, 0), 0u);  // a prefix
  // Ends on a whole paragraph, and the following paragraph would not have fit.
  EXPECT_EQ(opinion.compare(kept.size(), 2, "\n\n"), 0);
  EXPECT_GT(opinion.find("\n\n", kept.size() + 2) + 2, budget);

  const auto p = render_kg_prompt(doc("c", opinion), budget);
  EXPECT_TRUE(p.truncated);
  EXPECT_NE(p.text.find(kept), std::string::npos);
}

TEST(Truncation, NoParagraphBreakFallsBackToCharacterBoundary) {
  std::string opinion;
  for (int i = 0; i < 100; ++i) opinion += "\xc3\xa9";  // 2-byte characters
  const std::string kept = truncate_opinion(opinion, 51);
  EXPECT_EQ(kept.size(), 50u);
  EXPECT_EQ(truncate_opinion("short", 100), "short");
}

TEST(Extract, ValidCompletionIsOk) {
  llm::Gateway gw(by_opinion({{"@@OPINION@@", kValid}}), irac_test::fast_gateway_options());
  const auto out = extract_case_graph(doc("c1", "@@OPINION@@"), gw);
  EXPECT_EQ(out.status, ExtractionStatus::Ok);
  ASSERT_TRUE(out.graph);
  EXPECT_EQ(out.graph->relations().size(), 1u);
  EXPECT_EQ(out.raw_digest, sha256_hex(kValid));
  EXPECT_EQ(out.attempts, 1);
}

TEST(Extract, EndpointBreachIsOkWithDrops) {
  llm::Gateway gw(by_opinion({{"@@OPINION@@", kOneBreach}}), irac_test::fast_gateway_options());
  const auto out = extract_case_graph(doc("c1", "@@OPINION@@"), gw);
  EXPECT_EQ(out.status, ExtractionStatus::OkWithDrops);
  EXPECT_EQ(out.report.dropped_relations, std::vector<std::string>{"REL2"});
  EXPECT_EQ(out.graph->entities().size(), 3u);
}

TEST(Extract, ProseApologyIsQuarantinedAfterReprompts) {
  auto backend = by_opinion({{"@@OPINION@@", "I'm sorry, I can't produce that."}});
  llm::Gateway gw(backend, irac_test::fast_gateway_options());
  const auto out = extract_case_graph(doc("c1", "@@OPINION@@"), gw);
  EXPECT_EQ(out.status, ExtractionStatus::Quarantined);
  EXPECT_FALSE(out.graph);
  EXPECT_EQ(out.attempts, 3);
  EXPECT_EQ(backend->calls(), 3);
  const auto reqs = backend->requests();
  EXPECT_EQ(reqs[0].temperature, 0.0);
  EXPECT_EQ(reqs[1].temperature, 0.0);
  EXPECT_EQ(reqs[2].temperature, 0.2);
  EXPECT_EQ(reqs[0].max_output, 8192);
  ASSERT_FALSE(out.errors.empty());
  EXPECT_NE(out.errors.back().find("UnparseableDocument"), std::string::npos);
}

TEST(Extract, RepromptRecoversOnSecondAnswer) {
  int n = 0;
  auto backend = std::make_shared<ScriptedBackend>([&](const llm::LlmRequest&) {
    return irac_test::text_response(n++ == 0 ? "garbage" : kValid);
  });
  llm::Gateway gw(backend, irac_test::fast_gateway_options());
  const auto out = extract_case_graph(doc("c1", "@@OPINION@@"), gw);
  EXPECT_EQ(out.status, ExtractionStatus::Ok);
  EXPECT_EQ(out.attempts, 2);
}

TEST(Extract, GatewayFailureIsQuarantinedNotThrown) {
  TempDir out;
  llm::Gateway gw(by_opinion({}), irac_test::fast_gateway_options());
  ExtractionOptions o;
  o.out_dir = out.path();
  const auto outcome = extract_case_graph(doc("c1", "@@OPINION@@"), gw, o);
  EXPECT_EQ(outcome.status, ExtractionStatus::Quarantined);
  EXPECT_TRUE(fs::exists(out / "quarantine/c1.errors.json"));
}

TEST(RunExtraction, AllValid) {
  TempDir out;
  auto backend = by_opinion({{"@@ONE@@", kValid}, {"@@TWO@@", kValid}, {"@@THREE@@", kValid}});
  llm::Gateway gw(backend, irac_test::fast_gateway_options());
  const CaseCorpus corpus({doc("a", "@@ONE@@"), doc("b", "@@TWO@@"), doc("c", "@@THREE@@")});
  const auto s = run_extraction(corpus, gw, out.path(), {}, 2);
  EXPECT_EQ(s.ok, 3u);
  EXPECT_EQ(s.ok_with_drops, 0u);
  EXPECT_EQ(s.quarantined, 0u);
  EXPECT_EQ(backend->calls(), 3);

  // Immediately again: nothing re-extracted.
  const auto again = run_extraction(corpus, gw, out.path());
  EXPECT_EQ(backend->calls(), 3);
  EXPECT_EQ(again.ok, 3u);
  EXPECT_EQ(again.reused, 3u);
}

TEST(RunExtraction, OneMalformedOfThree) {
  TempDir out;
  llm::Gateway gw(by_opinion({{"@@ONE@@", kValid}, {"@@TWO@@", "no json at all"}, {"@@THREE@@", kOneBreach}}),
                  irac_test::fast_gateway_options());
  const CaseCorpus corpus({doc("a", "@@ONE@@"), doc("b", "@@TWO@@"), doc("c", "@@THREE@@")});
  const auto s = run_extraction(corpus, gw, out.path());
  EXPECT_EQ(s.ok + s.ok_with_drops + s.quarantined, corpus.size());
  EXPECT_EQ(s.ok, 1u);
  EXPECT_EQ(s.ok_with_drops, 1u);
  EXPECT_EQ(s.quarantined, 1u);
  EXPECT_TRUE(fs::exists(out / "quarantine/b.raw.txt"));
  EXPECT_EQ(read_text(out / "quarantine/b.raw.txt"), "no json at all");
  EXPECT_TRUE(fs::exists(out / "quarantine/b.errors.json"));
  EXPECT_FALSE(fs::exists(out / "b.kg.json"));

  // Persisted graphs load strictly, so the drops were applied before writing.
  const auto graphs = load_graphs(out.path());
  ASSERT_EQ(graphs.size(), 2u);
  for (const auto& g : graphs) {
    const auto re = parse_graph_json(read_text(graph_path(out.path(), g.case_id())), g.case_id());
    EXPECT_TRUE(re.report.violations.empty());
  }
}

TEST(RunExtraction, QuarantinedCasesAreRetriedOnRerun) {
  TempDir out;
  std::string answer = "no json";
  auto backend = std::make_shared<ScriptedBackend>([&](const llm::LlmRequest&) { return irac_test::text_response(answer); });
  llm::Gateway gw(backend, irac_test::fast_gateway_options());
  const CaseCorpus corpus({doc("a", "@@ONE@@")});
  EXPECT_EQ(run_extraction(corpus, gw, out.path()).quarantined, 1u);
  answer = kValid;
  const auto s = run_extraction(corpus, gw, out.path());
  EXPECT_EQ(s.ok, 1u);
  EXPECT_FALSE(fs::exists(out / "quarantine/a.raw.txt"));
}

TEST(LoadGraphs, OrderedByCaseIdAndStrict) {
  TempDir dir;
  irac_test::write_text(dir / "b.kg.json", kValid);
  irac_test::write_text(dir / "a.kg.json", kValid);
  irac_test::write_text(dir / "ignored.json", "{}");
  const auto graphs = load_graphs(dir.path());
  ASSERT_EQ(graphs.size(), 2u);
  EXPECT_EQ(graphs[0].case_id(), "a");
  irac_test::write_text(dir / "c.kg.json", kOneBreach);
  EXPECT_THROW(load_graphs(dir.path()), Error);
}
