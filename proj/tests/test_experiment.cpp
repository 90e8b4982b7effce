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

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "corruptrag/config.hpp"
#include "corruptrag/error.hpp"
#include "corruptrag/experiment.hpp"
#include "corruptrag/scripted.hpp"
#include "test_support.hpp"

namespace corruptrag {
namespace {

ExperimentConfig toy() { return load_config(testing::config_file("offline_toy.json")); }

TEST(Experiment, ToyRunShapesAndDirections) {
  auto report = run_experiment(toy());
  EXPECT_TRUE(report.complete);
  EXPECT_FALSE(report.partial());
  EXPECT_EQ(report.cells.size(), 1u + 4u * 5u);
  auto* base = report.find_cell("baseline", "none");
  ASSERT_NE(base, nullptr);
  EXPECT_EQ(base->metrics.accuracy, 1.0);
  for (auto attack : {"as", "ak"}) {
    auto* cell = report.find_cell(attack, "none");
    ASSERT_NE(cell, nullptr);
    EXPECT_EQ(cell->metrics.asr, 1.0) << attack;
    EXPECT_EQ(cell->metrics.recall, 1.0) << attack;
    EXPECT_NEAR(*cell->metrics.f1, 1.0 / 3.0, 1e-12) << attack;
  }
  EXPECT_TRUE(report.find_cell("ak", "none")->verified);
  EXPECT_EQ(report.find_cell("pia", "none")->metrics.asr, 1.0);
  EXPECT_EQ(report.find_cell("pia", "instructional")->metrics.asr, 0.0);
  EXPECT_EQ(report.find_cell("pia", "detection")->metrics.tpr, 1.0);
  EXPECT_EQ(report.find_cell("as", "detection")->metrics.tpr, 0.0);
  auto* expansion = report.find_cell("as", "expansion");
  EXPECT_EQ(expansion->n, 10u);
  for (const auto& t : expansion->trials) EXPECT_EQ(t.retrieved_ids.size(), 10u);
  EXPECT_FALSE(report.caveats.empty());
}

TEST(Experiment, DeterministicAcrossRunsAndParallelism) {
  auto a = toy();
  a.parallelism = 1;
  auto b = toy();
  b.parallelism = 4;
  auto ra = run_experiment(a);
  auto rb = run_experiment(b);
  auto rc = run_experiment(b);
  ASSERT_EQ(ra.cells.size(), rb.cells.size());
  for (std::size_t i = 0; i < ra.cells.size(); ++i) {
    EXPECT_EQ(ra.cells[i].trials, rb.cells[i].trials) << ra.cells[i].attack << "/" << ra.cells[i].defense;
    EXPECT_EQ(ra.cells[i].metrics, rb.cells[i].metrics);
    EXPECT_EQ(rb.cells[i], rc.cells[i]);
  }
}

TEST(Experiment, QuerySamplingIsSeededAndSorted) {
  auto c = load_config(testing::config_file("offline_desk.json"));
  c.query_limit = 5;
  auto first = select_queries(c);
  auto again = select_queries(c);
  ASSERT_EQ(first.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(first[i].id, again[i].id);
  EXPECT_TRUE(std::is_sorted(first.begin(), first.end(), [](auto& x, auto& y) { return x.id < y.id; }));
  c.seed += 1;
  auto other = select_queries(c);
  bool differs = false;
  for (std::size_t i = 0; i < 5; ++i) differs |= other[i].id != first[i].id;
  EXPECT_TRUE(differs);
}

TEST(Experiment, BudgetAbortYieldsPartialReport) {
  auto c = toy();
  c.attacks = {AttackKind::kAS};
  c.defenses = {DefenseKind::kNone};
  c.max_calls = 6;
  auto providers = make_providers(c);
  providers.generator = scripted::fixed("Brazil");
  providers.budget = std::make_shared<Budget>(c.max_calls, 0.0);
  auto report = run_experiment(c, providers);
  EXPECT_FALSE(report.complete);
  EXPECT_TRUE(report.partial());
  EXPECT_NE(report.abort_reason.find("budget"), std::string::npos);
  EXPECT_EQ(report.ledgers.at("generate").calls, 6u);
  std::size_t done = 0;
  for (const auto& cell : report.cells) done += cell.trials.size();
  EXPECT_LE(done, 6u);
}

TEST(Experiment, ProviderFailuresBecomeFailedTrials) {
  auto c = toy();
  c.attacks = {AttackKind::kAS};
  c.defenses = {DefenseKind::kNone};
  c.baseline = false;
  auto providers = make_providers(c);
  providers.generator = scripted::failing(500, false);
  auto report = run_experiment(c, providers);
  EXPECT_TRUE(report.complete);
  EXPECT_TRUE(report.partial());
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_EQ(report.cells[0].metrics.failed, 4u);
  EXPECT_FALSE(report.cells[0].metrics.asr);
}

TEST(Experiment, CraftFailuresAreRecordedPerQuery) {
  auto c = toy();
  c.attacks = {AttackKind::kAK};
  c.defenses = {DefenseKind::kNone};
  c.baseline = false;
  auto providers = make_providers(c);
  providers.refiner = scripted::failing(503, true);
  auto report = run_experiment(c, providers);
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_EQ(report.cells[0].metrics.failed, 4u);
  for (const auto& t : report.cells[0].trials) EXPECT_FALSE(t.error.empty());
}

TEST(Experiment, LlmJudgeNeedsRemoteProvider) {
  auto c = toy();
  c.judge = JudgeKind::kLlm;
  EXPECT_THROW(make_providers(c), Error);
}

TEST(Audit, ToyCorpusSupportsEveryCorrectAnswer) {
  auto c = toy();
  auto audit = run_audit(c, make_providers(c));
  EXPECT_EQ(audit.counts.size(), 4u);
  for (const auto& [qid, count] : audit.counts) EXPECT_GE(count, 1u) << qid;
  auto doc = audit_to_json(audit);
  EXPECT_TRUE(doc.contains("histogram"));
}

}  // namespace
}  // namespace corruptrag
