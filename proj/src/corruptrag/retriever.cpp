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

#include "corruptrag/retriever.hpp"

#include <algorithm>

#include "corruptrag/error.hpp"

namespace corruptrag {

std::vector<std::string> RetrievalResult::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(ranked.size());
  for (const auto& r : ranked) ids.push_back(r.doc_id);
  return ids;
}

std::optional<std::size_t> RetrievalResult::rank_of(std::string_view doc_id) const {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].doc_id == doc_id) return i + 1;
  }
  return std::nullopt;
}

EmbeddedStore EmbeddedStore::build(const StoreSnapshot& store, Embedder& embedder, bool normalize) {
  EmbeddedStore out;
  out.store_ = store;
  std::vector<std::string> texts;
  texts.reserve(store.size());
  for (const auto& d : store.documents()) texts.push_back(d.text);
  if (!texts.empty()) out.vectors_ = embedder.embed_batch(texts);
  if (out.vectors_.size() != store.size()) {
    throw Error(ErrorCode::kProvider, "embedder returned the wrong number of vectors");
  }
  for (const auto& v : out.vectors_) {
    if (v.dim() != out.vectors_.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "store embeddings mix dimensions");
    }
  }
  if (normalize) {
    for (auto& v : out.vectors_) v = v.normalized();
  }
  return out;
}

RetrievalResult retrieve_top_n(const EmbeddingVector& query, const EmbeddedStore& index, std::size_t n,
                               SimilarityMetric metric, std::string query_id) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "retrieval depth n must be at least 1");
  const auto docs = index.store().documents();
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot retrieve from an empty store");

  std::vector<ScoredDoc> scored;
  scored.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    scored.push_back({docs[i].id, similarity(query, index.vectors()[i], metric)});
  }
  auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  return RetrievalResult{std::move(query_id), std::move(scored), n};
}

RetrievalResult retrieve_top_n(std::string_view query_text, const EmbeddedStore& index, std::size_t n,
                               SimilarityMetric metric, Embedder& embedder, std::string query_id) {
  if (index.store().empty()) throw Error(ErrorCode::kInvalidArgument, "cannot retrieve from an empty store");
  return retrieve_top_n(embedder.embed(query_text), index, n, metric, std::move(query_id));
}

RetrievalResult retrieve_top_n(std::string_view query_text, const StoreSnapshot& store, std::size_t n,
                               SimilarityMetric metric, Embedder& embedder, std::string query_id) {
  if (store.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot retrieve from an empty store");
  auto index = EmbeddedStore::build(store, embedder);
  return retrieve_top_n(query_text, index, n, metric, embedder, std::move(query_id));
}

bool SubstringRelevanceJudge::implies_correct_answer(const TargetedQuery& query, std::string_view text) {
  return !query.correct_answer.empty() && text.find(query.correct_answer) != std::string_view::npos;
}

std::size_t relevance_audit(const TargetedQuery& query, const RetrievalResult& result,
                            const StoreSnapshot& store, RelevanceJudge& judge) {
  std::size_t count = 0;
  for (const auto& r : result.ranked) {
    const Document* doc = store.find(r.doc_id);
    if (doc == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "retrieved id '" + r.doc_id + "' is not in the store");
    }
    if (judge.implies_correct_answer(query, doc->text)) ++count;
  }
  return count;
}

}  // namespace corruptrag
