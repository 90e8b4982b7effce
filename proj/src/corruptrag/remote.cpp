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

#include "corruptrag/remote.hpp"

#include <algorithm>
#include <future>

#include <nlohmann/json.hpp>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

using json = nlohmann::json;

namespace {

std::map<std::string, std::string> request_headers(const std::string& api_key) {
  std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
  if (!api_key.empty()) headers["Authorization"] = "Bearer " + api_key;
  return headers;
}

std::shared_ptr<HttpTransport> default_transport(std::shared_ptr<HttpTransport> t) {
  return t ? std::move(t) : std::make_shared<HttplibTransport>();
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("provider returned invalid JSON: ") + e.what(), 200, false);
  }
}

}  // namespace

RemoteChatProvider::RemoteChatProvider(RemoteEndpoint endpoint, double temperature, int max_tokens,
                                       std::shared_ptr<HttpTransport> transport, SleepFn sleep)
    : endpoint_(std::move(endpoint)),
      temperature_(temperature),
      max_tokens_(max_tokens),
      transport_(default_transport(std::move(transport))),
      sleep_(std::move(sleep)),
      limiter_(endpoint_.requests_per_second, endpoint_.burst) {
  parse_url(endpoint_.url);
  if (endpoint_.model.empty()) throw Error(ErrorCode::kConfig, "chat endpoint needs a model name");
}

std::string RemoteChatProvider::build_request_body(const std::vector<ChatMessage>& messages) const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", endpoint_.model}, {"messages", std::move(msgs)}, {"temperature", temperature_}};
  if (max_tokens_ > 0) body["max_tokens"] = max_tokens_;
  return body.dump();
}

Completion RemoteChatProvider::parse_response(const std::string& body,
                                              const std::vector<ChatMessage>& messages) {
  auto root = parse_body(body);
  Completion c;
  try {
    const auto& content = root.at("choices").at(0).at("message").at("content");
    c.text = content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError("chat response has no choices[0].message.content", 200, false);
  }
  auto usage = root.find("usage");
  if (usage != root.end() && usage->is_object()) {
    c.input_tokens = usage->value("prompt_tokens", 0ULL);
    c.output_tokens = usage->value("completion_tokens", 0ULL);
  } else {
    for (const auto& m : messages) c.input_tokens += text::whitespace_token_count(m.content);
    c.output_tokens = text::whitespace_token_count(c.text);
  }
  return c;
}

Completion RemoteChatProvider::complete(const std::vector<ChatMessage>& messages) {
  auto response = post_with_retry(*transport_, endpoint_.url, request_headers(endpoint_.api_key),
                                  build_request_body(messages), endpoint_.retry, &limiter_, sleep_);
  return parse_response(response.body, messages);
}

RemoteEmbedder::RemoteEmbedder(RemoteEndpoint endpoint, std::size_t batch_size, std::size_t parallelism,
                               std::shared_ptr<HttpTransport> transport, std::shared_ptr<Budget> budget,
                               SleepFn sleep)
    : endpoint_(std::move(endpoint)),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      parallelism_(std::max<std::size_t>(1, parallelism)),
      transport_(default_transport(std::move(transport))),
      budget_(std::move(budget)),
      sleep_(std::move(sleep)),
      limiter_(endpoint_.requests_per_second, endpoint_.burst) {
  parse_url(endpoint_.url);
  if (endpoint_.model.empty()) throw Error(ErrorCode::kConfig, "embedding endpoint needs a model name");
}

std::vector<EmbeddingVector> RemoteEmbedder::parse_response(const std::string& body, std::size_t expected) {
  auto root = parse_body(body);
  std::vector<std::optional<EmbeddingVector>> slots(expected);
  try {
    const auto& data = root.at("data");
    if (data.size() != expected) {
      throw ProviderError("embedding response has " + std::to_string(data.size()) + " items for " +
                              std::to_string(expected) + " inputs",
                          200, false);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t index = data[i].value("index", i);
      if (index >= expected || slots[index]) {
        throw ProviderError("embedding response has a bad index", 200, false);
      }
      slots[index] = EmbeddingVector(data[i].at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what(), 200, false);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(expected);
  const std::size_t dim = expected == 0 ? 0 : slots.front()->dim();
  for (auto& s : slots) {
    if (s->dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "embedding response mixes dimensions");
    }
    out.push_back(std::move(*s));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_chunk(std::span<const std::string> texts) {
  if (budget_) budget_->reserve_call();
  json body = {{"model", endpoint_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  auto response = post_with_retry(*transport_, endpoint_.url, request_headers(endpoint_.api_key),
                                  body.dump(), endpoint_.retry, &limiter_, sleep_);
  return parse_response(response.body, texts.size());
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
  require_non_blank(texts);
  std::vector<std::span<const std::string>> chunks;
  for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
    chunks.push_back(texts.subspan(start, std::min(batch_size_, texts.size() - start)));
  }
  std::vector<std::vector<EmbeddingVector>> results(chunks.size());
  for (std::size_t wave = 0; wave < chunks.size(); wave += parallelism_) {
    std::vector<std::future<std::vector<EmbeddingVector>>> inflight;
    for (std::size_t c = wave; c < std::min(chunks.size(), wave + parallelism_); ++c) {
      inflight.push_back(std::async(std::launch::async, [this, chunk = chunks[c]] { return embed_chunk(chunk); }));
    }
    for (std::size_t k = 0; k < inflight.size(); ++k) results[wave + k] = inflight[k].get();
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results) {
    for (auto& v : r) {
      if (!out.empty() && v.dim() != out.front().dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "embedding endpoint returned mixed dimensions");
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace corruptrag
