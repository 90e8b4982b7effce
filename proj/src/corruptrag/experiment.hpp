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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corruptrag/attacks.hpp"
#include "corruptrag/config.hpp"
#include "corruptrag/corpus.hpp"
#include "corruptrag/embedder.hpp"
#include "corruptrag/provider.hpp"
#include "corruptrag/report.hpp"

namespace corruptrag {

// Everything a run talks to. A null chat role is served by its scripted
// double; a null generator means the scripted generator.
struct Providers {
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<ChatProvider> generator;
  std::shared_ptr<ChatProvider> refiner;           // AK refinement
  std::shared_ptr<ChatProvider> writer;            // PoisonedRAG corpus writer
  std::shared_ptr<ChatProvider> paraphraser;
  std::shared_ptr<ChatProvider> detector;
  std::shared_ptr<ChatProvider> expansion_writer;
  std::shared_ptr<ChatProvider> judge;             // null = normalized-substring judge
  std::shared_ptr<Budget> budget;
};

// Builds remote clients, scripted doubles and the (cached) embedder from the
// configuration. API keys are read from the environment variables it names.
Providers make_providers(const ExperimentConfig& config);

// Loads the queries and applies the seeded sample limit; result sorted by id.
std::vector<TargetedQuery> select_queries(const ExperimentConfig& config);

struct CraftBatch {
  std::vector<PoisonedText> poisons;                          // query order
  std::vector<std::pair<std::string, std::string>> failures;  // query id, reason
};

// Crafts one poison per query with the roles in `providers`; prices, seed and
// parallelism come from `config`.
CraftBatch craft_poisons(const std::vector<TargetedQuery>& queries, const AttackConfig& attack,
                         const ExperimentConfig& config, const Providers& providers);

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const Providers& providers);

// Per-query count of top-n texts that support the correct answer on the clean
// store, plus a histogram over those counts.
struct AuditResult {
  std::string judge;
  std::size_t n = 0;
  std::map<std::string, std::size_t> counts;
  std::map<std::size_t, std::size_t> histogram;
};

AuditResult run_audit(const ExperimentConfig& config, const Providers& providers);
nlohmann::json audit_to_json(const AuditResult& audit);

}  // namespace corruptrag
