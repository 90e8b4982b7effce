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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace corruptrag {

struct DefenseFlags {
  std::optional<std::string> paraphrased_query;
  bool paraphrase_fell_back = false;
  bool hardened_prompt = false;
  bool detection_ran = false;
  std::vector<std::string> flagged_ids;
  std::size_t poisons_judged = 0;
  std::size_t poisons_flagged = 0;
  std::size_t label_parse_failures = 0;
  bool expanded = false;

  bool operator==(const DefenseFlags&) const = default;
};

// One targeted query run through one (attack, defense) cell.
struct TrialOutcome {
  std::string query_id;
  std::string generated_answer;
  bool judged_match = false;              // generated answer matches A_i
  std::optional<bool> correct_match;      // generated answer matches C_i
  bool poison_injected = false;
  std::optional<std::size_t> poison_rank; // 1-based rank of this query's poison
  std::vector<std::string> retrieved_ids; // rank order, before any filtering
  std::vector<std::string> contexts_used; // what the generator actually saw
  DefenseFlags defense;
  std::optional<bool> poison_verified;
  int poison_attempts = 0;
  std::string error;                      // non-empty when the trial failed

  bool failed() const { return !error.empty(); }
  bool operator==(const TrialOutcome&) const = default;
};

// Ratios are nullopt when undefined for the outcome set.
struct MetricsSummary {
  std::optional<double> asr;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> tpr;
  std::optional<double> accuracy;
  std::size_t n = 0;
  std::size_t trials = 0;   // successful trials the ratios are computed over
  std::size_t failed = 0;

  bool operator==(const MetricsSummary&) const = default;
};

// Failed trials are counted but excluded from every ratio. Throws on an empty
// outcome list, n == 0, or a poison rank outside [1, n].
MetricsSummary compute_metrics(std::span<const TrialOutcome> outcomes, std::size_t n);

// Mean of the indicator terms; the optimisation objective the attacks target.
double hit_ratio(std::span<const TrialOutcome> outcomes);

std::optional<double> f1_score(std::optional<double> precision, std::optional<double> recall);

}  // namespace corruptrag
