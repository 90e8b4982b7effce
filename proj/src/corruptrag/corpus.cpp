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

#include "corruptrag/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

using json = nlohmann::json;

std::string poison_doc_id(std::string_view query_id) {
  return std::string(kPoisonIdPrefix) + std::string(query_id);
}

bool is_poison_doc_id(std::string_view doc_id) {
  return doc_id.starts_with(kPoisonIdPrefix);
}

void validate(const TargetedQuery& query) {
  if (query.id.empty()) throw Error(ErrorCode::kInvalidArgument, "query id is empty");
  if (text::is_blank(query.question)) {
    throw Error(ErrorCode::kInvalidArgument, "query '" + query.id + "' has an empty question");
  }
  if (text::is_blank(query.correct_answer) || text::is_blank(query.targeted_answer)) {
    throw Error(ErrorCode::kInvalidArgument,
                "query '" + query.id + "' needs both a correct and a targeted answer");
  }
  if (query.correct_answer == query.targeted_answer) {
    throw Error(ErrorCode::kInvalidArgument,
                "query '" + query.id + "': targeted answer must differ from the correct answer");
  }
}

struct StoreSnapshot::Impl {
  std::vector<Document> documents;
  std::unordered_map<std::string, std::size_t> by_id;
  std::map<std::string, std::string> injected_index;
};

StoreSnapshot::StoreSnapshot() : impl_(std::make_shared<const Impl>()) {}

StoreSnapshot::StoreSnapshot(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

StoreSnapshot StoreSnapshot::from_documents(std::vector<Document> documents) {
  auto impl = std::make_shared<Impl>();
  impl->by_id.reserve(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& doc = documents[i];
    if (doc.id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "document #" + std::to_string(i) + " has an empty id");
    }
    if (doc.text.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "document '" + doc.id + "' has empty text");
    }
    if (!impl->by_id.emplace(doc.id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate document id '" + doc.id + "'");
    }
    if (doc.origin.is_injected()) {
      const auto& q = doc.origin.injected_for;
      if (doc.id != poison_doc_id(q)) {
        throw Error(ErrorCode::kConstraint,
                    "injected document '" + doc.id + "' must be named '" + poison_doc_id(q) + "'");
      }
      if (!impl->injected_index.emplace(q, doc.id).second) {
        throw Error(ErrorCode::kConstraint,
                    "query '" + q + "' already has an injected document");
      }
    } else if (is_poison_doc_id(doc.id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "benign document id '" + doc.id + "' uses the reserved prefix 'poison:'");
    }
  }
  impl->documents = std::move(documents);
  return StoreSnapshot(std::move(impl));
}

std::span<const Document> StoreSnapshot::documents() const { return impl_->documents; }

std::size_t StoreSnapshot::size() const { return impl_->documents.size(); }

const Document* StoreSnapshot::find(std::string_view id) const {
  auto it = impl_->by_id.find(std::string(id));
  return it == impl_->by_id.end() ? nullptr : &impl_->documents[it->second];
}

const std::map<std::string, std::string>& StoreSnapshot::injected_index() const {
  return impl_->injected_index;
}

bool StoreSnapshot::operator==(const StoreSnapshot& other) const {
  return impl_->documents == other.impl_->documents;
}

namespace {

std::string required_string(const json& record, std::initializer_list<const char*> keys,
                            std::size_t line_no) {
  for (const char* key : keys) {
    auto it = record.find(key);
    if (it == record.end()) continue;
    if (!it->is_string()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": field '" + key +
                                         "' must be a string");
    }
    return it->get<std::string>();
  }
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": missing field '" +
                                     *keys.begin() + "'");
}

template <typename F>
void for_each_record(std::istream& in, F&& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": malformed record (" + e.what() + ")");
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": record is not an object");
    }
    on_record(record, line_no);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

StoreSnapshot ingest_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& record, std::size_t line_no) {
    Document doc;
    doc.id = required_string(record, {"id", "_id"}, line_no);
    doc.text = required_string(record, {"text"}, line_no);
    if (doc.id.empty() || text::is_blank(doc.text)) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": id and text must be non-empty");
    }
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  });
  return StoreSnapshot::from_documents(std::move(docs));
}

StoreSnapshot ingest_corpus_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return ingest_corpus(in);
}

std::vector<TargetedQuery> load_queries(std::istream& in) {
  std::vector<TargetedQuery> queries;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& record, std::size_t line_no) {
    TargetedQuery q;
    q.id = required_string(record, {"id", "_id"}, line_no);
    q.question = required_string(record, {"question"}, line_no);
    q.correct_answer = required_string(record, {"correct_answer"}, line_no);
    q.targeted_answer = required_string(record, {"targeted_answer"}, line_no);
    try {
      validate(q);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(q.id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": duplicate query id '" + q.id + "'");
    }
    queries.push_back(std::move(q));
  });
  return queries;
}

std::vector<TargetedQuery> load_queries_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_queries(in);
}

StoreSnapshot inject(const StoreSnapshot& store, std::span<const Injection> poisons) {
  std::set<std::string> requested;
  for (const auto& p : poisons) {
    if (p.query_id.empty()) throw Error(ErrorCode::kInvalidArgument, "poison has an empty query id");
    if (text::is_blank(p.text)) {
      throw Error(ErrorCode::kInvalidArgument, "poison for '" + p.query_id + "' is empty");
    }
    if (!requested.insert(p.query_id).second) {
      throw Error(ErrorCode::kConstraint,
                  "two poisons requested for query '" + p.query_id + "' (|P_i| = 1)");
    }
    if (store.injected_index().contains(p.query_id)) {
      throw Error(ErrorCode::kConstraint,
                  "query '" + p.query_id + "' already has an injected document");
    }
  }
  std::vector<Document> docs(store.documents().begin(), store.documents().end());
  docs.reserve(docs.size() + poisons.size());
  for (const auto& p : poisons) {
    docs.push_back({poison_doc_id(p.query_id), p.text, Origin::injected(p.query_id)});
  }
  return StoreSnapshot::from_documents(std::move(docs));
}

StoreSnapshot append_benign(const StoreSnapshot& store, std::vector<Document> documents) {
  std::vector<Document> docs(store.documents().begin(), store.documents().end());
  for (auto& d : documents) {
    d.origin = Origin::benign();
    docs.push_back(std::move(d));
  }
  return StoreSnapshot::from_documents(std::move(docs));
}

std::string store_to_json_string(const StoreSnapshot& store) {
  json docs = json::array();
  for (const auto& d : store.documents()) {
    json origin = d.origin.is_injected()
                      ? json{{"kind", "injected"}, {"query_id", d.origin.injected_for}}
                      : json{{"kind", "benign"}};
    docs.push_back({{"id", d.id}, {"text", d.text}, {"origin", std::move(origin)}});
  }
  json root = {{"format", "corruptrag-store"},
               {"schema_version", kStoreSchemaVersion},
               {"documents", std::move(docs)}};
  return root.dump(1) + "\n";
}

StoreSnapshot store_from_json_string(std::string_view data) {
  json root;
  try {
    root = json::parse(data);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("store file is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || root.value("format", "") != "corruptrag-store") {
    throw Error(ErrorCode::kSchema, "not a corruptrag store file");
  }
  auto version = root.find("schema_version");
  if (version == root.end() || !version->is_number_integer()) {
    throw Error(ErrorCode::kSchema, "store file has no schema_version");
  }
  if (version->get<int>() != kStoreSchemaVersion) {
    throw Error(ErrorCode::kSchema, "unsupported store schema_version " +
                                        std::to_string(version->get<int>()) + " (expected " +
                                        std::to_string(kStoreSchemaVersion) + ")");
  }
  std::vector<Document> docs;
  try {
    for (const auto& d : root.at("documents")) {
      Document doc{d.at("id").get<std::string>(), d.at("text").get<std::string>(), {}};
      const auto& origin = d.at("origin");
      auto kind = origin.at("kind").get<std::string>();
      if (kind == "injected") {
        doc.origin = Origin::injected(origin.at("query_id").get<std::string>());
      } else if (kind != "benign") {
        throw Error(ErrorCode::kSchema, "unknown origin kind '" + kind + "'");
      }
      docs.push_back(std::move(doc));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("malformed store file: ") + e.what());
  }
  return StoreSnapshot::from_documents(std::move(docs));
}

void persist(const StoreSnapshot& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << store_to_json_string(store);
  if (!out) throw Error(ErrorCode::kIo, "write failure on '" + path.string() + "'");
}

StoreSnapshot load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return store_from_json_string(buffer.str());
}

}  // namespace corruptrag
