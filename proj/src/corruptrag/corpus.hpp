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

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corruptrag {

inline constexpr std::string_view kPoisonIdPrefix = "poison:";
inline constexpr int kStoreSchemaVersion = 1;

std::string poison_doc_id(std::string_view query_id);
bool is_poison_doc_id(std::string_view doc_id);

// Provenance of a document. An empty query_id means benign.
struct Origin {
  std::string injected_for;

  static Origin benign() { return {}; }
  static Origin injected(std::string query_id) { return {std::move(query_id)}; }

  bool is_injected() const { return !injected_for.empty(); }
  bool operator==(const Origin&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  Origin origin;

  bool operator==(const Document&) const = default;
};

struct TargetedQuery {
  std::string id;
  std::string question;
  std::string correct_answer;
  std::string targeted_answer;
};

// Throws kInvalidArgument when the query breaks its invariants (empty id or
// question, empty answers, correct == targeted).
void validate(const TargetedQuery& query);

struct Injection {
  std::string query_id;
  std::string text;
};

// Immutable view of the knowledge database. Copies share storage; every
// mutation (inject, expand) produces a new snapshot.
class StoreSnapshot {
 public:
  StoreSnapshot();

  // Validates ids (non-empty, unique) and texts (non-empty), and that each
  // query has at most one injected document.
  static StoreSnapshot from_documents(std::vector<Document> documents);

  std::span<const Document> documents() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  const Document* find(std::string_view id) const;

  // query_id -> injected document id, ordered by query_id.
  const std::map<std::string, std::string>& injected_index() const;

  bool operator==(const StoreSnapshot& other) const;

 private:
  struct Impl;
  explicit StoreSnapshot(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Line-delimited JSON records with fields id (or _id) and text. Blank lines
// are skipped. Errors name the offending line or id.
StoreSnapshot ingest_corpus(std::istream& in);
StoreSnapshot ingest_corpus_file(const std::filesystem::path& path);

// Line-delimited JSON records {id, question, correct_answer, targeted_answer}.
std::vector<TargetedQuery> load_queries(std::istream& in);
std::vector<TargetedQuery> load_queries_file(const std::filesystem::path& path);

// Adds one Injected document per entry, id = "poison:" + query_id. Fails with
// kConstraint if a query already has a poison in the store or appears twice
// in the request.
StoreSnapshot inject(const StoreSnapshot& store, std::span<const Injection> poisons);

// Appends benign documents (knowledge expansion, fixtures).
StoreSnapshot append_benign(const StoreSnapshot& store, std::vector<Document> documents);

void persist(const StoreSnapshot& store, const std::filesystem::path& path);
StoreSnapshot load_store(const std::filesystem::path& path);

std::string store_to_json_string(const StoreSnapshot& store);
StoreSnapshot store_from_json_string(std::string_view json);

}  // namespace corruptrag
