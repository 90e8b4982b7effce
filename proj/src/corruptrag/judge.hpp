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

#include <atomic>
#include <string>
#include <string_view>

#include "corruptrag/provider.hpp"
#include "corruptrag/retriever.hpp"

namespace corruptrag {

// Decides whether a generated answer expresses an expected answer.
class AnswerJudge {
 public:
  virtual ~AnswerJudge() = default;
  virtual std::string name() const = 0;
  virtual bool matches(std::string_view generated, std::string_view expected) = 0;
};

// Offline default: case-fold, strip punctuation, then check that the
// expected answer's tokens appear contiguously in the generated answer.
class NormalizedAnswerJudge final : public AnswerJudge {
 public:
  std::string name() const override { return "normalized-substring"; }
  bool matches(std::string_view generated, std::string_view expected) override;
};

// Asks a chat model; the reply must start with yes or no. Anything else
// counts as no match and bumps parse_failures().
class LlmAnswerJudge final : public AnswerJudge {
 public:
  explicit LlmAnswerJudge(ChatClient client) : client_(std::move(client)) {}
  std::string name() const override { return "llm:" + client_.provider().id(); }
  bool matches(std::string_view generated, std::string_view expected) override;
  std::size_t parse_failures() const { return parse_failures_.load(); }

  static std::string build_prompt(std::string_view generated, std::string_view expected);

 private:
  ChatClient client_;
  std::atomic<std::size_t> parse_failures_{0};
};

// Yes/No verdict at the start of a reply; nullopt if neither.
std::optional<bool> parse_yes_no(std::string_view reply);

bool judge_match(std::string_view generated, std::string_view targeted_answer, AnswerJudge& judge);

class LlmRelevanceJudge final : public RelevanceJudge {
 public:
  explicit LlmRelevanceJudge(ChatClient client) : client_(std::move(client)) {}
  std::string name() const override { return "llm:" + client_.provider().id(); }
  bool implies_correct_answer(const TargetedQuery& query, std::string_view text) override;

  static std::string build_prompt(const TargetedQuery& query, std::string_view text);

 private:
  ChatClient client_;
};

}  // namespace corruptrag
