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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corruptrag/attacks.hpp"
#include "corruptrag/defenses.hpp"
#include "corruptrag/embedder.hpp"
#include "corruptrag/generator.hpp"
#include "corruptrag/http.hpp"
#include "corruptrag/provider.hpp"

namespace corruptrag {

enum class ProviderKind { kScripted, kRemote };

// A chat-completions role (generator, attacker, defender, judge).
struct ChatRoleConfig {
  ProviderKind kind = ProviderKind::kScripted;
  std::string url;
  std::string model;
  std::string api_key_env;
  double temperature = 0.0;
  int max_tokens = 256;
  TokenPrices prices;
  double requests_per_second = 0.0;
  double burst = 1.0;
  RetryPolicy retry;
};

struct EmbedderConfig {
  ProviderKind kind = ProviderKind::kScripted;  // scripted = the offline hashing embedder
  std::size_t dim = OfflineEmbedder::kDefaultDim;
  std::optional<std::filesystem::path> cache_path;
  std::string url;
  std::string model;
  std::string api_key_env;
  std::size_t batch_size = 64;
  double requests_per_second = 0.0;
  double burst = 1.0;
  RetryPolicy retry;
};

enum class JudgeKind { kSubstring, kLlm };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;

  std::filesystem::path corpus_path;
  std::filesystem::path queries_path;
  std::size_t query_limit = 0;  // 0 = all queries

  std::size_t n = 5;
  SimilarityMetric metric = SimilarityMetric::kDotProduct;
  bool normalize = false;

  EmbedderConfig embedder;
  ChatRoleConfig generator;
  ChatRoleConfig attacker;
  ChatRoleConfig defender;
  ChatRoleConfig judge_llm;
  std::string system_prompt{kDefaultRagPrompt};

  std::vector<AttackKind> attacks{AttackKind::kAS};
  AttackConfig attack;

  std::vector<DefenseKind> defenses{DefenseKind::kNone};
  int expansion_k = 5;
  std::size_t expanded_n = 10;
  std::optional<std::filesystem::path> expansion_fixture;
  std::string paraphrase_prompt{kDefaultParaphrasePrompt};

  JudgeKind judge = JudgeKind::kSubstring;

  std::uint64_t max_calls = 0;  // 0 = unlimited
  double max_spend = 0.0;

  bool baseline = true;

  void validate() const;
};

// Relative paths resolve against base_dir. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Forces scripted chat roles and the offline embedder.
void force_offline(ExperimentConfig& config);

// Applies run-time overrides: {"defenses": [...], "attacks": [...], "n": 5,
// "metric": "dot", "seed": 1, "limit": 20, "parallelism": 4, "offline": true}.
void apply_overrides(ExperimentConfig& config, const nlohmann::json& overrides);

// Normalised echo of every value that affects results.
nlohmann::json config_to_json(const ExperimentConfig& config);

const char* provider_kind_name(ProviderKind kind);
const char* judge_kind_name(JudgeKind kind);

}  // namespace corruptrag
