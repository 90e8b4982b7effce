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
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corruptrag/provider.hpp"

namespace corruptrag {

// Offline chat provider driven by a pure function of the prompt (all message
// contents joined by newlines). Token counts are whitespace-split counts.
class ScriptedChatProvider final : public ChatProvider {
 public:
  using Responder = std::function<std::string(const std::string& prompt, std::uint64_t call_index)>;

  ScriptedChatProvider(std::string name, Responder responder)
      : name_(std::move(name)), responder_(std::move(responder)) {}

  std::string id() const override { return "scripted:" + name_; }
  Completion complete(const std::vector<ChatMessage>& messages) override;

  std::uint64_t calls() const { return calls_.load(); }

 private:
  std::string name_;
  Responder responder_;
  std::atomic<std::uint64_t> calls_{0};
};

namespace scripted {

std::shared_ptr<ScriptedChatProvider> echo();
std::shared_ptr<ScriptedChatProvider> fixed(std::string reply);

// Call k returns replies[min(k, size-1)].
std::shared_ptr<ScriptedChatProvider> schedule(std::vector<std::string> replies);

// Every call fails with a ProviderError.
std::shared_ptr<ScriptedChatProvider> failing(int http_status = 503, bool retryable = true);

// Detection judge: "[Label: Yes]" when the judged text contains any marker
// (case-insensitive), "[Label: No]" otherwise.
std::shared_ptr<ScriptedChatProvider> instruction_detector(
    std::vector<std::string> markers = {"respond only with"});

// Paraphraser: shuffles the words of the question (the prompt's last line)
// with a generator seeded from `seed` and the question text.
std::shared_ptr<ScriptedChatProvider> word_shuffle_paraphraser(std::uint64_t seed);

// AK refiner: rewrites the bracketed AS sentences of the "Corpus:" line into
// prose that still asserts the targeted answer.
std::shared_ptr<ScriptedChatProvider> ak_refiner();

// PoisonedRAG writer: a short passage naming the answer from the prompt.
std::shared_ptr<ScriptedChatProvider> poisonedrag_writer();

// Knowledge-expansion writer: a passage stating the prompt's correct answer.
std::shared_ptr<ScriptedChatProvider> expansion_writer();

}  // namespace scripted
}  // namespace corruptrag
