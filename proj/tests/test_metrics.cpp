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

#include <random>

#include <gtest/gtest.h>

#include "corruptrag/error.hpp"
#include "corruptrag/metrics.hpp"
#include "oracles.hpp"

namespace corruptrag {
namespace {

TrialOutcome attacked(std::string qid, std::optional<std::size_t> rank, bool match, std::size_t n) {
  TrialOutcome o;
  o.query_id = std::move(qid);
  o.poison_injected = true;
  o.judged_match = match;
  for (std::size_t i = 0; i < n; ++i) o.retrieved_ids.push_back("d" + std::to_string(i));
  if (rank) {
    o.poison_rank = rank;
    o.retrieved_ids[*rank - 1] = "poison:" + o.query_id;
  }
  return o;
}

TEST(Metrics, SinglePoisonAlwaysRetrievedAtDepthFive) {
  std::vector<TrialOutcome> rows;
  for (int i = 0; i < 4; ++i) rows.push_back(attacked("q" + std::to_string(i), 1 + i % 5, true, 5));
  auto m = compute_metrics(rows, 5);
  EXPECT_DOUBLE_EQ(*m.recall, 1.0);
  EXPECT_DOUBLE_EQ(*m.precision, 0.2);
  EXPECT_NEAR(*m.f1, 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(*m.asr, 1.0);
  EXPECT_FALSE(m.tpr);
  EXPECT_FALSE(m.accuracy);
}

TEST(Metrics, F1CeilingForOnePoisonPerQuery) {
  for (std::size_t n = 1; n <= 30; ++n) {
    std::vector<TrialOutcome> rows{attacked("q", 1, true, n)};
    auto f1 = compute_metrics(rows, n).f1;
    ASSERT_TRUE(f1);
    EXPECT_NEAR(*f1, 2.0 / (n + 1.0), 1e-12);
  }
}

TEST(Metrics, MixedOutcomes) {
  std::vector<TrialOutcome> rows{attacked("a", 2, true, 5), attacked("b", std::nullopt, false, 5)};
  TrialOutcome failed;
  failed.query_id = "c";
  failed.error = "boom";
  rows.push_back(failed);
  auto m = compute_metrics(rows, 5);
  EXPECT_EQ(m.trials, 2u);
  EXPECT_EQ(m.failed, 1u);
  EXPECT_DOUBLE_EQ(*m.asr, 0.5);
  EXPECT_DOUBLE_EQ(*m.recall, 0.5);
  EXPECT_DOUBLE_EQ(*m.precision, 0.1);
  EXPECT_NEAR(*m.f1, 2 * 0.1 * 0.5 / 0.6, 1e-12);
}

TEST(Metrics, NoPoisonRetrievedLeavesF1Undefined) {
  std::vector<TrialOutcome> rows{attacked("a", std::nullopt, false, 3)};
  auto m = compute_metrics(rows, 3);
  EXPECT_DOUBLE_EQ(*m.recall, 0.0);
  EXPECT_DOUBLE_EQ(*m.precision, 0.0);
  EXPECT_FALSE(m.f1);
}

TEST(Metrics, TprAndAccuracy) {
  TrialOutcome a;
  a.query_id = "a";
  a.correct_match = true;
  a.defense.detection_ran = true;
  a.defense.poisons_judged = 1;
  a.defense.poisons_flagged = 1;
  TrialOutcome b = a;
  b.query_id = "b";
  b.correct_match = false;
  b.defense.poisons_flagged = 0;
  std::vector<TrialOutcome> rows{a, b};
  auto m = compute_metrics(rows, 5);
  EXPECT_DOUBLE_EQ(*m.tpr, 0.5);
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.5);
  EXPECT_FALSE(m.recall);
}

TEST(Metrics, AllFailedYieldsNoRatios) {
  TrialOutcome f;
  f.query_id = "x";
  f.error = "down";
  std::vector<TrialOutcome> rows{f};
  auto m = compute_metrics(rows, 5);
  EXPECT_EQ(m.failed, 1u);
  EXPECT_FALSE(m.asr);
}

TEST(Metrics, InvalidInputs) {
  std::vector<TrialOutcome> none;
  EXPECT_THROW(compute_metrics(none, 5), Error);
  std::vector<TrialOutcome> rows{attacked("a", 1, true, 5)};
  EXPECT_THROW(compute_metrics(rows, 0), Error);
  rows[0].poison_rank = 6;
  EXPECT_THROW(compute_metrics(rows, 5), Error);
  EXPECT_THROW(hit_ratio(none), Error);
}

TEST(Metrics, AgreesWithOracleOnRandomSets) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> depth(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    auto n = depth(rng);
    auto rows = oracle::random_outcomes(rng, n);
    auto got = compute_metrics(rows, n);
    auto want = oracle::metrics(rows, n);
    auto same = [](std::optional<double> a, std::optional<double> b) {
      return a.has_value() == b.has_value() && (!a || std::abs(*a - *b) < 1e-12);
    };
    EXPECT_TRUE(same(got.asr, want.asr)) << trial;
    EXPECT_TRUE(same(got.recall, want.recall)) << trial;
    EXPECT_TRUE(same(got.precision, want.precision)) << trial;
    EXPECT_TRUE(same(got.f1, want.f1)) << trial;
    EXPECT_TRUE(same(got.tpr, want.tpr)) << trial;
    EXPECT_TRUE(same(got.accuracy, want.accuracy)) << trial;
    if (want.asr) EXPECT_NEAR(hit_ratio(rows), *want.asr, 1e-12);
  }
}

}  // namespace
}  // namespace corruptrag
