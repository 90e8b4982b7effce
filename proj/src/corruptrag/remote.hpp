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

#include <memory>
#include <string>

#include "corruptrag/embedder.hpp"
#include "corruptrag/http.hpp"
#include "corruptrag/provider.hpp"

namespace corruptrag {

struct RemoteEndpoint {
  std::string url;          // full URL, e.g. https://api.openai.com/v1/chat/completions
  std::string model;
  std::string api_key;      // already resolved; empty = no Authorization header
  RetryPolicy retry;
  double requests_per_second = 0.0;  // 0 = unlimited
  double burst = 1.0;
};

// OpenAI-compatible chat endpoint:
//   POST {model, messages: [{role, content}...], temperature, max_tokens}
//   -> {choices: [{message: {content}}], usage: {prompt_tokens, completion_tokens}}
class RemoteChatProvider final : public ChatProvider {
 public:
  RemoteChatProvider(RemoteEndpoint endpoint, double temperature, int max_tokens,
                     std::shared_ptr<HttpTransport> transport = nullptr, SleepFn sleep = {});

  std::string id() const override { return "remote:" + endpoint_.model; }
  Completion complete(const std::vector<ChatMessage>& messages) override;

  std::string build_request_body(const std::vector<ChatMessage>& messages) const;
  static Completion parse_response(const std::string& body, const std::vector<ChatMessage>& messages);

 private:
  RemoteEndpoint endpoint_;
  double temperature_;
  int max_tokens_;
  std::shared_ptr<HttpTransport> transport_;
  SleepFn sleep_;
  TokenBucket limiter_;
};

// OpenAI-compatible embeddings endpoint:
//   POST {model, input: [texts]} -> {data: [{index, embedding: [floats]}]}
// Inputs are split into batches of batch_size; up to `parallelism` batches
// are in flight at once.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(RemoteEndpoint endpoint, std::size_t batch_size = 64, std::size_t parallelism = 1,
                 std::shared_ptr<HttpTransport> transport = nullptr,
                 std::shared_ptr<Budget> budget = nullptr, SleepFn sleep = {});

  std::string provider_id() const override { return "remote:" + endpoint_.url; }
  std::string model_id() const override { return endpoint_.model; }

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  static std::vector<EmbeddingVector> parse_response(const std::string& body, std::size_t expected);

 private:
  std::vector<EmbeddingVector> embed_chunk(std::span<const std::string> texts);

  RemoteEndpoint endpoint_;
  std::size_t batch_size_;
  std::size_t parallelism_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<Budget> budget_;
  SleepFn sleep_;
  TokenBucket limiter_;
};

}  // namespace corruptrag
