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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corruptrag {

// Dense embedding with finite entries. Construction rejects NaN/Inf and
// zero-length input.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  EmbeddingVector normalized() const;  // zero vectors are returned unchanged

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

enum class SimilarityMetric { kDotProduct, kCosine };

const char* metric_name(SimilarityMetric metric);
SimilarityMetric parse_metric(std::string_view name);  // "dot" | "cosine"

// Dot product, or cosine = dot / (|a| |b|). Throws kDimensionMismatch on
// unequal dims and kInvalidArgument for cosine against a zero vector.
double similarity(const EmbeddingVector& a, const EmbeddingVector& b, SimilarityMetric metric);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string provider_id() const = 0;
  virtual std::string model_id() const = 0;

  // Output order matches input order. Every text must be non-blank.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;

  EmbeddingVector embed(std::string_view text);
};

// Throws kInvalidArgument naming the first blank text.
void require_non_blank(std::span<const std::string> texts);

// Bag-of-tokens hashing embedder: lowercase, split on non-alphanumeric runs,
// FNV-1a 64 of each token modulo dim, +1 per occurrence. Additive over
// space-joined concatenations.
class OfflineEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit OfflineEmbedder(std::size_t dim = kDefaultDim);

  std::string provider_id() const override { return "offline"; }
  std::string model_id() const override;
  std::size_t dim() const { return dim_; }

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  EmbeddingVector embed_one(std::string_view text) const;

 private:
  std::size_t dim_;
};

}  // namespace corruptrag
