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

#include "corruptrag/embedder.hpp"

#include <cmath>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::kInvalidArgument, "embedding has zero dimensions");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "embedding has a non-finite entry");
  }
}

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

EmbeddingVector EmbeddingVector::normalized() const {
  double n = norm();
  if (n == 0.0) return *this;
  std::vector<double> out(values_);
  for (auto& v : out) v /= n;
  return EmbeddingVector(std::move(out));
}

const char* metric_name(SimilarityMetric metric) {
  return metric == SimilarityMetric::kDotProduct ? "dot" : "cosine";
}

SimilarityMetric parse_metric(std::string_view name) {
  auto lower = text::to_lower(name);
  if (lower == "dot" || lower == "dot_product" || lower == "dotproduct") {
    return SimilarityMetric::kDotProduct;
  }
  if (lower == "cosine" || lower == "cos") return SimilarityMetric::kCosine;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown similarity metric '" + std::string(name) + "' (expected dot or cosine)");
}

double similarity(const EmbeddingVector& a, const EmbeddingVector& b, SimilarityMetric metric) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding dims differ: " + std::to_string(a.dim()) +
                                                   " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
  if (metric == SimilarityMetric::kDotProduct) return dot;
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cosine similarity is undefined for a zero vector");
  }
  return dot / (na * nb);
}

EmbeddingVector Embedder::embed(std::string_view text) {
  std::string owned(text);
  return embed_batch(std::span<const std::string>(&owned, 1)).front();
}

void require_non_blank(std::span<const std::string> texts) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (text::is_blank(texts[i])) {
      throw Error(ErrorCode::kInvalidArgument, "text #" + std::to_string(i) + " is blank");
    }
  }
}

OfflineEmbedder::OfflineEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "offline embedder dim must be positive");
}

std::string OfflineEmbedder::model_id() const {
  return "fnv1a-bag-of-tokens-" + std::to_string(dim_);
}

EmbeddingVector OfflineEmbedder::embed_one(std::string_view input) const {
  std::vector<double> values(dim_, 0.0);
  for (const auto& token : text::tokenize(input)) {
    values[text::fnv1a64(token) % dim_] += 1.0;
  }
  return EmbeddingVector(std::move(values));
}

std::vector<EmbeddingVector> OfflineEmbedder::embed_batch(std::span<const std::string> texts) {
  require_non_blank(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

}  // namespace corruptrag
