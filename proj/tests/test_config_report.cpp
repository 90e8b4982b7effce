// Copyright (c) 2026 The corruptrag Authors. All Rights Reserved.
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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "corruptrag/config.hpp"
#include "corruptrag/error.hpp"
#include "corruptrag/report.hpp"
#include "test_support.hpp"

namespace corruptrag {
namespace {

using json = nlohmann::json;
using testing::TempDir;

json minimal() {
  return json{{"corpus", {{"path", "c.jsonl"}}}, {"queries", {{"path", "q.jsonl"}}}};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(Config, DefaultsAndRelativePaths) {
  auto c = parse_config(minimal(), "/base");
  EXPECT_EQ(c.corpus_path, std::filesystem::path("/base/c.jsonl"));
  EXPECT_EQ(c.n, 5u);
  EXPECT_EQ(c.metric, SimilarityMetric::kDotProduct);
  EXPECT_FALSE(c.normalize);
  EXPECT_EQ(c.generator.kind, ProviderKind::kScripted);
  EXPECT_EQ(c.generator.temperature, 0.0);
  EXPECT_EQ(c.generator.max_tokens, 256);
  EXPECT_EQ(c.attacks, std::vector<AttackKind>{AttackKind::kAS});
  EXPECT_EQ(c.defenses, std::vector<DefenseKind>{DefenseKind::kNone});
  EXPECT_EQ(c.expansion_k, 5);
  EXPECT_EQ(c.expanded_n, 10u);
  EXPECT_EQ(c.attack.word_limit, 30);
  EXPECT_EQ(c.attack.max_attempts, 5);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto doc = minimal();
  doc["retriever"] = {{"n", 5}, {"depth", 3}};
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
  doc = minimal();
  doc["surprise"] = 1;
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
  doc = minimal();
  doc["retriever"] = {{"n", 0}};
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
  doc = minimal();
  doc["defenses"] = {{"cells", {"firewall"}}};
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
  doc = minimal();
  doc["generator"] = {{"kind", "remote"}};
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
  doc = minimal();
  doc.erase("corpus");
  EXPECT_EQ(code_of([&] { parse_config(doc, "/"); }), ErrorCode::kConfig);
}

TEST(Config, RolesInheritFromGenerator) {
  auto doc = minimal();
  doc["generator"] = {{"kind", "remote"}, {"url", "https://h/v1/chat/completions"}, {"model", "m"},
                      {"api_key_env", "K"}, {"max_tokens", 64}};
  doc["defender"] = {{"kind", "scripted"}};
  auto c = parse_config(doc, "/");
  EXPECT_EQ(c.attacker.kind, ProviderKind::kRemote);
  EXPECT_EQ(c.attacker.model, "m");
  EXPECT_EQ(c.attacker.max_tokens, 64);
  EXPECT_EQ(c.defender.kind, ProviderKind::kScripted);
}

TEST(Config, OverridesAndOffline) {
  auto c = load_config(testing::config_file("networked_nq.json"));
  EXPECT_EQ(c.generator.kind, ProviderKind::kRemote);
  apply_overrides(c, json{{"offline", true}, {"defenses", {"detection"}}, {"attacks", {"pia"}}, {"n", 3},
                          {"metric", "cosine"}, {"seed", 9}, {"limit", 2}, {"parallelism", 2}});
  EXPECT_EQ(c.generator.kind, ProviderKind::kScripted);
  EXPECT_EQ(c.embedder.kind, ProviderKind::kScripted);
  EXPECT_FALSE(c.embedder.cache_path);
  EXPECT_EQ(c.judge, JudgeKind::kSubstring);
  EXPECT_EQ(c.defenses, std::vector<DefenseKind>{DefenseKind::kLlmDetection});
  EXPECT_EQ(c.attacks, std::vector<AttackKind>{AttackKind::kPIA});
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.metric, SimilarityMetric::kCosine);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.query_limit, 2u);
  EXPECT_THROW(apply_overrides(c, json{{"depth", 3}}), Error);
  EXPECT_THROW(apply_overrides(c, json{{"n", 0}}), Error);
}

TEST(Config, ShippedConfigsParse) {
  for (auto name : {"offline_toy.json", "offline_desk.json", "networked_nq.json"}) {
    auto c = load_config(testing::config_file(name));
    EXPECT_TRUE(std::filesystem::exists(c.corpus_path)) << name;
    EXPECT_TRUE(std::filesystem::exists(c.queries_path)) << name;
    auto echo = config_to_json(c);
    EXPECT_EQ(echo["retriever"]["n"], c.n) << name;
  }
  EXPECT_EQ(code_of([] { load_config("/nonexistent/config.json"); }), ErrorCode::kConfig);
}

ExperimentReport sample_report() {
  ExperimentReport r;
  r.seed = 7;
  r.config = json{{"seed", 7}};
  r.providers = {{"generator", "scripted"}};
  for (auto defense : {"none", "detection"}) {
    CellReport cell;
    cell.attack = "pia";
    cell.defense = defense;
    cell.n = 5;
    TrialOutcome t;
    t.query_id = "q1";
    t.generated_answer = "Brazil";
    t.judged_match = std::string(defense) == "none";
    t.poison_injected = true;
    t.poison_rank = 1;
    t.retrieved_ids = {"poison:q1", "d1", "d2", "d3", "d4"};
    t.contexts_used = {"ctx"};
    t.defense.detection_ran = std::string(defense) == "detection";
    t.defense.poisons_judged = t.defense.detection_ran ? 1 : 0;
    t.defense.poisons_flagged = t.defense.poisons_judged;
    t.defense.flagged_ids = t.defense.detection_ran ? std::vector<std::string>{"poison:q1"} : std::vector<std::string>{};
    cell.trials = {t};
    cell.metrics = compute_metrics(cell.trials, 5);
    r.cells.push_back(cell);
  }
  r.ledgers["defense:detection"] = LedgerTotals{10, 2, 1, 0.5};
  r.ledger_total = LedgerTotals{10, 2, 1, 0.5};
  r.warnings = {"w"};
  r.caveats = {"c"};
  return r;
}

TEST(Report, JsonRoundTripIsByteStable) {
  auto r = sample_report();
  auto first = render_report(r, ReportFormat::kJson);
  auto back = report_from_json(json::parse(first));
  EXPECT_EQ(back.cells, r.cells);
  EXPECT_EQ(render_report(back, ReportFormat::kJson), first);
  EXPECT_EQ(render_report(r, ReportFormat::kJson), first);
}

TEST(Report, CsvHasSixRowsPerCell) {
  auto csv = render_report(sample_report(), ReportFormat::kCsv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "attack,defense,n,trials,metric,value");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], "pia,none,5,1,asr,1.000000");
  EXPECT_EQ(rows[4], "pia,none,5,1,tpr,NA");
  EXPECT_EQ(rows[10], "pia,detection,5,1,tpr,1.000000");
}

TEST(Report, UnknownFormatListsSupported) {
  try {
    parse_report_format("xml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("supported: json, csv"), std::string::npos);
  }
}

TEST(Report, EmitWritesOneFilePerFormatAndReloads) {
  TempDir dir;
  auto paths = emit_report(sample_report(), {"json", "csv"}, dir / "out");
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "out.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out.csv"));
  auto loaded = load_report(dir / "out.json");
  EXPECT_EQ(loaded.cells.size(), 2u);
  EXPECT_NE(loaded.find_cell("pia", "detection"), nullptr);
  EXPECT_EQ(loaded.find_cell("as", "none"), nullptr);
  EXPECT_FALSE(loaded.partial());
  EXPECT_THROW(load_report(dir / "out.csv"), Error);
}

TEST(Report, PartialWhenAbortedOrTrialsFail) {
  auto r = sample_report();
  r.cells[0].trials[0].error = "down";
  EXPECT_TRUE(r.partial());
  EXPECT_EQ(r.failed_trials(), 1u);
  auto a = sample_report();
  a.complete = false;
  a.abort_reason = "budget";
  EXPECT_TRUE(a.partial());
}

}  // namespace
}  // namespace corruptrag
