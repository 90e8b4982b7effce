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

#include "corruptrag/embedding_cache.hpp"

#include <string>

#include <nlohmann/json.hpp>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

using json = nlohmann::json;

CachedEmbedder::CachedEmbedder(std::shared_ptr<Embedder> inner,
                               std::optional<std::filesystem::path> path)
    : inner_(std::move(inner)), path_(std::move(path)) {
  if (!inner_) throw Error(ErrorCode::kInvalidArgument, "cached embedder needs an inner embedder");
  key_prefix_ = inner_->provider_id() + '\x1f' + inner_->model_id() + '\x1f';
  if (path_) {
    load_file();
    out_.open(*path_, std::ios::app | std::ios::binary);
    if (!out_) throw Error(ErrorCode::kIo, "cannot open embedding cache '" + path_->string() + "'");
  }
}

std::string CachedEmbedder::key_for(std::string_view input) const {
  return text::sha256_hex(key_prefix_ + text::sha256_hex(input));
}

std::size_t CachedEmbedder::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void CachedEmbedder::check_dim(std::size_t dim) {
  if (dim_ == 0) {
    dim_ = dim;
  } else if (dim != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "embedder returned dim " + std::to_string(dim) +
                                                   ", cache holds dim " + std::to_string(dim_));
  }
}

void CachedEmbedder::load_file() {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;  // first run
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    try {
      auto record = json::parse(line);
      auto dim = record.at("dim").get<std::size_t>();
      auto values = record.at("values").get<std::vector<double>>();
      if (values.size() != dim) throw Error(ErrorCode::kSchema, "dim does not match values");
      check_dim(dim);
      entries_.insert_or_assign(record.at("key").get<std::string>(), EmbeddingVector(std::move(values)));
    } catch (const json::exception& e) {
      // A torn final line from an interrupted run is dropped; anything earlier is corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::kSchema, "embedding cache line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<EmbeddingVector> CachedEmbedder::embed_batch(std::span<const std::string> texts) {
  require_non_blank(texts);
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  for (const auto& t : texts) keys.push_back(key_for(t));

  std::vector<std::optional<EmbeddingVector>> results(texts.size());
  std::vector<std::string> missing_texts;
  std::vector<std::size_t> missing_slots;
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = entries_.find(keys[i]);
      if (it != entries_.end()) {
        results[i] = it->second;
      } else {
        missing_texts.push_back(texts[i]);
        missing_slots.push_back(i);
      }
    }
  }
  hits_ += texts.size() - missing_slots.size();
  misses_ += missing_slots.size();

  if (!missing_texts.empty()) {
    auto fresh = inner_->embed_batch(missing_texts);
    if (fresh.size() != missing_texts.size()) {
      throw Error(ErrorCode::kProvider, "embedder returned " + std::to_string(fresh.size()) +
                                            " vectors for " + std::to_string(missing_texts.size()) +
                                            " inputs");
    }
    std::lock_guard lock(mu_);
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      check_dim(fresh[j].dim());
      const auto& key = keys[missing_slots[j]];
      entries_.insert_or_assign(key, fresh[j]);
      if (out_.is_open()) {
        json record = {{"key", key},
                       {"dim", fresh[j].dim()},
                       {"values", std::vector<double>(fresh[j].values().begin(), fresh[j].values().end())}};
        out_ << record.dump() << '\n';
      }
      results[missing_slots[j]] = std::move(fresh[j]);
    }
    if (out_.is_open()) out_.flush();
  }

  std::vector<EmbeddingVector> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace corruptrag
