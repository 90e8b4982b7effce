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

#include <optional>
#include <string>
#include <vector>

#include "corruptrag/corpus.hpp"
#include "corruptrag/embedder.hpp"

namespace corruptrag {

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

struct RetrievalResult {
  std::string query_id;
  std::vector<ScoredDoc> ranked;  // score descending, ties by ascending doc_id
  std::size_t n_requested = 0;

  std::vector<std::string> doc_ids() const;
  // 1-based rank of doc_id, if retrieved.
  std::optional<std::size_t> rank_of(std::string_view doc_id) const;
};

// A snapshot with every document embedded once. Document vectors are
// optionally L2-normalized (queries never are).
class EmbeddedStore {
 public:
  static EmbeddedStore build(const StoreSnapshot& store, Embedder& embedder, bool normalize = false);

  const StoreSnapshot& store() const { return store_; }
  const std::vector<EmbeddingVector>& vectors() const { return vectors_; }

 private:
  StoreSnapshot store_;
  std::vector<EmbeddingVector> vectors_;
};

// Exact linear-scan top-n. Throws kInvalidArgument on an empty store or n == 0.
RetrievalResult retrieve_top_n(const EmbeddingVector& query, const EmbeddedStore& index, std::size_t n,
                               SimilarityMetric metric, std::string query_id = {});

RetrievalResult retrieve_top_n(std::string_view query_text, const EmbeddedStore& index, std::size_t n,
                               SimilarityMetric metric, Embedder& embedder, std::string query_id = {});

// Convenience form that embeds the store on every call (cheap behind a cache).
RetrievalResult retrieve_top_n(std::string_view query_text, const StoreSnapshot& store, std::size_t n,
                               SimilarityMetric metric, Embedder& embedder, std::string query_id = {});

class RelevanceJudge {
 public:
  virtual ~RelevanceJudge() = default;
  virtual std::string name() const = 0;
  virtual bool implies_correct_answer(const TargetedQuery& query, std::string_view text) = 0;
};

// Relevant iff the text contains the correct answer verbatim.
class SubstringRelevanceJudge final : public RelevanceJudge {
 public:
  std::string name() const override { return "substring"; }
  bool implies_correct_answer(const TargetedQuery& query, std::string_view text) override;
};

// Number of retrieved texts the judge deems to imply the correct answer.
std::size_t relevance_audit(const TargetedQuery& query, const RetrievalResult& result,
                            const StoreSnapshot& store, RelevanceJudge& judge);

}  // namespace corruptrag
