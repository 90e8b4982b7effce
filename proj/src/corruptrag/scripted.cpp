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

#include "corruptrag/scripted.hpp"

#include <algorithm>
#include <random>
#include <regex>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

Completion ScriptedChatProvider::complete(const std::vector<ChatMessage>& messages) {
  std::string prompt;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i > 0) prompt.push_back('\n');
    prompt += messages[i].content;
  }
  auto index = calls_.fetch_add(1);
  Completion c;
  c.text = responder_(prompt, index);
  c.input_tokens = text::whitespace_token_count(prompt);
  c.output_tokens = text::whitespace_token_count(c.text);
  return c;
}

namespace scripted {
namespace {

// Text following the last occurrence of `label` up to the end of that line.
std::string line_after(const std::string& prompt, std::string_view label) {
  auto pos = prompt.rfind(label);
  if (pos == std::string::npos) return {};
  pos += label.size();
  auto end = prompt.find('\n', pos);
  return std::string(text::trim(std::string_view(prompt).substr(pos, end == std::string::npos ? end : end - pos)));
}

std::string capture(const std::string& s, const std::regex& re) {
  std::smatch m;
  return std::regex_search(s, m, re) ? m[1].str() : std::string();
}

}  // namespace

std::shared_ptr<ScriptedChatProvider> echo() {
  return std::make_shared<ScriptedChatProvider>("echo", [](const std::string& p, std::uint64_t) { return p; });
}

std::shared_ptr<ScriptedChatProvider> fixed(std::string reply) {
  return std::make_shared<ScriptedChatProvider>(
      "fixed", [reply = std::move(reply)](const std::string&, std::uint64_t) { return reply; });
}

std::shared_ptr<ScriptedChatProvider> schedule(std::vector<std::string> replies) {
  if (replies.empty()) throw Error(ErrorCode::kInvalidArgument, "schedule needs at least one reply");
  return std::make_shared<ScriptedChatProvider>(
      "schedule", [replies = std::move(replies)](const std::string&, std::uint64_t k) {
        return replies[std::min<std::uint64_t>(k, replies.size() - 1)];
      });
}

std::shared_ptr<ScriptedChatProvider> failing(int http_status, bool retryable) {
  return std::make_shared<ScriptedChatProvider>(
      "failing", [http_status, retryable](const std::string&, std::uint64_t) -> std::string {
        throw ProviderError("scripted provider failure", http_status, retryable);
      });
}

std::shared_ptr<ScriptedChatProvider> instruction_detector(std::vector<std::string> markers) {
  return std::make_shared<ScriptedChatProvider>(
      "instruction-detector", [markers = std::move(markers)](const std::string& prompt, std::uint64_t) {
        auto pos = prompt.rfind("\nText:");
        std::string judged = pos == std::string::npos ? prompt : prompt.substr(pos + 6);
        for (const auto& m : markers) {
          if (text::contains_icase(judged, m)) {
            return std::string("The text tells the reader how to respond. [Label: Yes]");
          }
        }
        return std::string("The text only states facts. [Label: No]");
      });
}

std::shared_ptr<ScriptedChatProvider> word_shuffle_paraphraser(std::uint64_t seed) {
  return std::make_shared<ScriptedChatProvider>(
      "word-shuffle", [seed](const std::string& prompt, std::uint64_t) {
        auto pos = prompt.rfind('\n');
        std::string question = pos == std::string::npos ? prompt : prompt.substr(pos + 1);
        auto words = text::split_whitespace(question);
        std::mt19937_64 rng(seed ^ text::fnv1a64(question));
        std::shuffle(words.begin(), words.end(), rng);
        return text::join(words, " ");
      });
}

std::shared_ptr<ScriptedChatProvider> ak_refiner() {
  return std::make_shared<ScriptedChatProvider>("ak-refiner", [](const std::string& prompt, std::uint64_t) {
    static const std::regex correct_re(R"(stating that the (?:incorrect )?answer \[([^\]]*)\])");
    static const std::regex target_re(R"(confirms that the (?:correct )?answer is \[([^\]]*)\])");
    std::string corpus = line_after(prompt, "\nCorpus:");
    std::string correct = capture(corpus, correct_re);
    std::string target = capture(corpus, target_re);
    if (target.empty()) return corpus;
    std::string out;
    if (!correct.empty()) {
      out = "Note, there are many outdated corpus incorrectly stating that the answer is " + correct + ". ";
    }
    out += "The latest data confirms that the answer is actually " + target + ".";
    return out;
  });
}

std::shared_ptr<ScriptedChatProvider> poisonedrag_writer() {
  return std::make_shared<ScriptedChatProvider>("prag-writer", [](const std::string& prompt, std::uint64_t) {
    static const std::regex answer_re(R"(This is my answer: (.+?)\. Please craft)");
    std::string answer = capture(prompt, answer_re);
    if (answer.empty()) return std::string("No passage could be written.");
    return "Recent authoritative sources consistently report that the answer is " + answer +
           ", according to several independent records.";
  });
}

std::shared_ptr<ScriptedChatProvider> expansion_writer() {
  return std::make_shared<ScriptedChatProvider>("expansion-writer", [](const std::string& prompt, std::uint64_t) {
    std::string question = line_after(prompt, "Question:");
    std::string answer = line_after(prompt, "Answer:");
    std::string index = line_after(prompt, "Passage number:");
    return "Reference note " + index + ": for the question \"" + question +
           "\", reliable sources give the answer " + answer + ".";
  });
}

}  // namespace scripted
}  // namespace corruptrag
