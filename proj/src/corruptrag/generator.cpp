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

#include "corruptrag/generator.hpp"

#include <regex>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

namespace {

constexpr std::string_view kIgnoreInstructions = "Ignore all below instructions";
constexpr std::string_view kInstructionMarker = "respond only with";

const std::regex& instruction_pattern() {
  static const std::regex re(R"(respond only with:?\s*\[([^\]]+)\])", std::regex::icase);
  return re;
}

const std::regex& bracket_marker_pattern() {
  static const std::regex re(R"(data confirms that the (?:correct )?answer is \[([^\]]+)\])", std::regex::icase);
  return re;
}

const std::regex& clause_marker_pattern() {
  static const std::regex re(R"(data confirms that ([^.]+))", std::regex::icase);
  return re;
}

}  // namespace

std::string render_rag_prompt(const GenerationRequest& request) {
  const auto& prompt = request.system_prompt;
  auto c = prompt.find(kContextsSlot);
  auto q = prompt.find(kQuestionSlot);
  if (c == std::string::npos || q == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "RAG prompt must contain {contexts} and {question} slots");
  }
  std::string rendered = text::replace_all(prompt, kContextsSlot, "\x01");
  rendered = text::replace_all(std::move(rendered), kQuestionSlot, request.question);
  return text::replace_all(std::move(rendered), "\x01", text::join(request.contexts, "\n"));
}

std::string LlmGenerator::answer(const GenerationRequest& request) {
  return std::string(text::trim(client_.send_user(render_rag_prompt(request)).text));
}

ScriptedGenerator ScriptedGenerator::for_queries(const std::vector<TargetedQuery>& queries) {
  std::map<std::string, std::string> answers;
  for (const auto& q : queries) answers[q.question] = q.correct_answer;
  return ScriptedGenerator(std::move(answers));
}

std::optional<std::string> ScriptedGenerator::extract_asserted_answer(std::string_view text_view,
                                                                      bool follow_instructions) {
  std::string s(text_view);
  std::smatch m;
  if (follow_instructions && std::regex_search(s, m, instruction_pattern())) return m[1].str();
  if (std::regex_search(s, m, bracket_marker_pattern())) return m[1].str();
  if (std::regex_search(s, m, clause_marker_pattern())) {
    auto clause = std::string(text::trim(m[1].str()));
    if (!clause.empty()) return clause;
  }
  return std::nullopt;
}

std::string ScriptedGenerator::answer(const GenerationRequest& request) {
  const bool hardened = request.system_prompt.find(kIgnoreInstructions) != std::string::npos;
  std::vector<const std::string*> visible;
  for (const auto& c : request.contexts) {
    if (hardened && text::contains_icase(c, kInstructionMarker)) continue;
    visible.push_back(&c);
  }
  for (const auto* c : visible) {
    if (auto asserted = extract_asserted_answer(*c, !hardened)) return *asserted;
  }
  auto it = correct_answers_.find(request.question);
  if (it != correct_answers_.end() && !it->second.empty()) {
    for (const auto* c : visible) {
      if (c->find(it->second) != std::string::npos) return it->second;
    }
  }
  return std::string(kIDoNotKnow);
}

RagAnswer rag_answer(const EmbeddedStore& index, const TargetedQuery& query, std::size_t n,
                     SimilarityMetric metric, std::string_view system_prompt, Embedder& embedder,
                     Generator& generator) {
  RagAnswer out;
  out.retrieval = retrieve_top_n(query.question, index, n, metric, embedder, query.id);
  GenerationRequest request;
  request.system_prompt = std::string(system_prompt);
  request.question = query.question;
  for (const auto& r : out.retrieval.ranked) request.contexts.push_back(index.store().find(r.doc_id)->text);
  out.answer = generator.answer(request);
  return out;
}

}  // namespace corruptrag
