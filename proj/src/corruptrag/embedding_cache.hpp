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
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "corruptrag/embedder.hpp"

namespace corruptrag {

// Content-addressed cache in front of another embedder. Keys hash
// (provider id, model id, sha256(text)). With a path, records are appended as
// JSON lines {key, dim, values} and reloaded on construction; duplicate keys
// resolve last-writer-wins. Safe for concurrent callers.
class CachedEmbedder final : public Embedder {
 public:
  explicit CachedEmbedder(std::shared_ptr<Embedder> inner,
                          std::optional<std::filesystem::path> path = std::nullopt);

  std::string provider_id() const override { return inner_->provider_id(); }
  std::string model_id() const override { return inner_->model_id(); }

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  std::string key_for(std::string_view text) const;

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }
  std::size_t size() const;

 private:
  void load_file();
  void check_dim(std::size_t dim);

  std::shared_ptr<Embedder> inner_;
  std::optional<std::filesystem::path> path_;
  std::string key_prefix_;

  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  std::size_t dim_ = 0;
  std::ofstream out_;

  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace corruptrag
