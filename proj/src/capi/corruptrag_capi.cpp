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

#include "corruptrag/corruptrag.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "corruptrag/attacks.hpp"
#include "corruptrag/config.hpp"
#include "corruptrag/corpus.hpp"
#include "corruptrag/error.hpp"
#include "corruptrag/experiment.hpp"
#include "corruptrag/report.hpp"
#include "corruptrag/text.hpp"

using json = nlohmann::json;
namespace cr = corruptrag;

struct crag_store {
  cr::StoreSnapshot snapshot;
};

struct crag_report {
  cr::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

crag_status to_status(cr::ErrorCode code) {
  switch (code) {
    case cr::ErrorCode::kInvalidArgument: return CRAG_ERR_INVALID_ARGUMENT;
    case cr::ErrorCode::kIo: return CRAG_ERR_IO;
    case cr::ErrorCode::kParse: return CRAG_ERR_PARSE;
    case cr::ErrorCode::kConstraint: return CRAG_ERR_CONSTRAINT;
    case cr::ErrorCode::kSchema: return CRAG_ERR_SCHEMA;
    case cr::ErrorCode::kDimensionMismatch: return CRAG_ERR_DIMENSION;
    case cr::ErrorCode::kProvider: return CRAG_ERR_PROVIDER;
    case cr::ErrorCode::kBudget: return CRAG_ERR_BUDGET;
    case cr::ErrorCode::kConfig: return CRAG_ERR_CONFIG;
  }
  return CRAG_ERR_INTERNAL;
}

template <typename Fn>
crag_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CRAG_OK;
  } catch (const cr::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return CRAG_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CRAG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CRAG_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw cr::Error(cr::ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_optional(const char* text) {
  if (text == nullptr || cr::text::is_blank(text)) return json();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw cr::Error(cr::ErrorCode::kConfig, std::string("options are not valid JSON: ") + e.what());
  }
}

cr::ExperimentConfig config_with_overrides(const char* config_path, const char* overrides_json) {
  require(config_path, "config_path");
  auto config = cr::load_config(config_path);
  cr::apply_overrides(config, parse_optional(overrides_json));
  return config;
}

}  // namespace

extern "C" {

const char* crag_last_error(void) { return g_last_error.c_str(); }

const char* crag_version(void) { return cr::kVersion.data(); }

const char* crag_status_name(crag_status status) {
  switch (status) {
    case CRAG_OK: return "ok";
    case CRAG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CRAG_ERR_IO: return "io";
    case CRAG_ERR_PARSE: return "parse";
    case CRAG_ERR_CONSTRAINT: return "constraint";
    case CRAG_ERR_SCHEMA: return "schema";
    case CRAG_ERR_DIMENSION: return "dimension_mismatch";
    case CRAG_ERR_PROVIDER: return "provider";
    case CRAG_ERR_BUDGET: return "budget";
    case CRAG_ERR_CONFIG: return "config";
    case CRAG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void crag_string_free(char* s) { std::free(s); }

crag_status crag_store_ingest_file(const char* corpus_jsonl, crag_store** out) {
  return guarded([&] {
    require(corpus_jsonl, "corpus_jsonl");
    require(out, "out");
    *out = new crag_store{cr::ingest_corpus_file(corpus_jsonl)};
  });
}

crag_status crag_store_load(const char* path, crag_store** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new crag_store{cr::load_store(path)};
  });
}

crag_status crag_store_save(const crag_store* store, const char* path) {
  return guarded([&] {
    require(store, "store");
    require(path, "path");
    cr::persist(store->snapshot, path);
  });
}

crag_status crag_store_inject_file(const crag_store* store, const char* poisons_jsonl, crag_store** out) {
  return guarded([&] {
    require(store, "store");
    require(poisons_jsonl, "poisons_jsonl");
    require(out, "out");
    auto poisons = cr::read_poisons_file(poisons_jsonl);
    std::vector<cr::Injection> injections;
    injections.reserve(poisons.size());
    for (const auto& p : poisons) injections.push_back(cr::to_injection(p));
    *out = new crag_store{cr::inject(store->snapshot, injections)};
  });
}

size_t crag_store_size(const crag_store* store) { return store ? store->snapshot.size() : 0; }

size_t crag_store_injected_count(const crag_store* store) {
  return store ? store->snapshot.injected_index().size() : 0;
}

void crag_store_free(crag_store* store) { delete store; }

crag_status crag_craft(const char* queries_jsonl, const char* options_json, const char* out_jsonl) {
  return guarded([&] {
    require(queries_jsonl, "queries_jsonl");
    require(out_jsonl, "out_jsonl");
    json opts = parse_optional(options_json);
    if (opts.is_null()) opts = json::object();
    if (!opts.is_object()) throw cr::Error(cr::ErrorCode::kConfig, "options must be a JSON object");

    cr::ExperimentConfig config;
    if (opts.contains("config")) {
      config = cr::load_config(opts["config"].get<std::string>());
    } else {
      config.corpus_path = "unused";
      config.queries_path = queries_jsonl;
    }
    if (opts.value("offline", !opts.contains("config"))) cr::force_offline(config);

    cr::AttackConfig attack = config.attack;
    attack.kind = cr::parse_attack(opts.value("attack", std::string("as")));
    if (opts.contains("order")) attack.order = cr::parse_order(opts["order"].get<std::string>());
    if (opts.contains("ablate")) attack.ablate_keyword = opts["ablate"].get<std::string>();
    if (opts.contains("V")) attack.word_limit = opts["V"].get<int>();
    if (opts.contains("L")) attack.max_attempts = opts["L"].get<int>();

    auto queries = cr::load_queries_file(queries_jsonl);
    auto batch = cr::craft_poisons(queries, attack, config, cr::make_providers(config));
    cr::write_poisons_file(out_jsonl, batch.poisons);
    if (!batch.failures.empty()) {
      throw cr::Error(cr::ErrorCode::kProvider,
                      "wrote " + std::to_string(batch.poisons.size()) + " poisons; " +
                          std::to_string(batch.failures.size()) + " queries failed, first '" +
                          batch.failures.front().first + "': " + batch.failures.front().second);
    }
  });
}

crag_status crag_craft_as(const char* question, const char* correct_answer, const char* targeted_answer,
                          const char* order, char** out_text) {
  return guarded([&] {
    require(question, "question");
    require(correct_answer, "correct_answer");
    require(targeted_answer, "targeted_answer");
    require(out_text, "out_text");
    cr::TargetedQuery q{"q", question, correct_answer, targeted_answer};
    cr::AttackConfig attack;
    if (order != nullptr && *order != '\0') attack.order = cr::parse_order(order);
    *out_text = dup_string(cr::craft_as(q, attack).full_text);
  });
}

crag_status crag_run(const char* config_path, const char* overrides_json, crag_report** out) {
  return guarded([&] {
    require(out, "out");
    auto config = config_with_overrides(config_path, overrides_json);
    *out = new crag_report{cr::run_experiment(config)};
  });
}

crag_status crag_report_load(const char* path, crag_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new crag_report{cr::load_report(path)};
  });
}

crag_status crag_report_to_json(const crag_report* report, char** out_json) {
  return guarded([&] {
    require(report, "report");
    require(out_json, "out_json");
    *out_json = dup_string(cr::render_report(report->report, cr::ReportFormat::kJson));
  });
}

crag_status crag_report_emit(const crag_report* report, const char* formats, const char* out_prefix) {
  return guarded([&] {
    require(report, "report");
    require(formats, "formats");
    require(out_prefix, "out_prefix");
    std::vector<std::string> tokens;
    std::string current;
    for (const char* p = formats;; ++p) {
      if (*p == ',' || *p == '\0') {
        auto t = std::string(cr::text::trim(current));
        if (!t.empty()) tokens.push_back(t);
        current.clear();
        if (*p == '\0') break;
      } else {
        current.push_back(*p);
      }
    }
    if (tokens.empty()) throw cr::Error(cr::ErrorCode::kInvalidArgument, "no report formats given");
    cr::emit_report(report->report, tokens, out_prefix);
  });
}

int crag_report_complete(const crag_report* report) { return report && !report->report.partial() ? 1 : 0; }

void crag_report_free(crag_report* report) { delete report; }

crag_status crag_audit(const char* config_path, const char* overrides_json, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    auto config = config_with_overrides(config_path, overrides_json);
    auto audit = cr::run_audit(config, cr::make_providers(config));
    *out_json = dup_string(cr::audit_to_json(audit).dump(2) + "\n");
  });
}

}  // extern "C"
