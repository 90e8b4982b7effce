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

#include "corruptrag/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "corruptrag/error.hpp"

namespace corruptrag {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::kConfig, "config " + where + ": " + message);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key, "wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

ProviderKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "scripted" || s == "offline") return ProviderKind::kScripted;
  if (s == "remote") return ProviderKind::kRemote;
  fail(where, "kind must be scripted, offline or remote, got '" + s + "'");
}

void read_retry(const json& obj, RetryPolicy& retry, const std::string& where) {
  int max_retries = retry.max_retries;
  long long initial_ms = retry.initial_delay.count();
  read(obj, "max_retries", max_retries, where);
  read(obj, "initial_delay_ms", initial_ms, where);
  if (max_retries < 0 || initial_ms < 0) fail(where, "retry settings must be >= 0");
  retry.max_retries = max_retries;
  retry.initial_delay = std::chrono::milliseconds(initial_ms);
}

ChatRoleConfig parse_chat(const json& obj, const std::string& where, const ChatRoleConfig& base,
                          std::initializer_list<const char*> extra = {}) {
  std::set<std::string> allowed = {"kind", "url", "model", "api_key_env", "temperature", "max_tokens",
                                   "price_input_per_million", "price_output_per_million",
                                   "requests_per_second", "burst", "max_retries", "initial_delay_ms"};
  allowed.insert(extra.begin(), extra.end());
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
  ChatRoleConfig c = base;
  std::string kind = provider_kind_name(c.kind);
  read(obj, "kind", kind, where);
  c.kind = parse_kind(kind, where + ".kind");
  read(obj, "url", c.url, where);
  read(obj, "model", c.model, where);
  read(obj, "api_key_env", c.api_key_env, where);
  read(obj, "temperature", c.temperature, where);
  read(obj, "max_tokens", c.max_tokens, where);
  read(obj, "price_input_per_million", c.prices.input_per_million, where);
  read(obj, "price_output_per_million", c.prices.output_per_million, where);
  read(obj, "requests_per_second", c.requests_per_second, where);
  read(obj, "burst", c.burst, where);
  read_retry(obj, c.retry, where);
  return c;
}

json chat_to_json(const ChatRoleConfig& c) {
  return json{{"kind", provider_kind_name(c.kind)},
              {"url", c.url},
              {"model", c.model},
              {"api_key_env", c.api_key_env},
              {"temperature", c.temperature},
              {"max_tokens", c.max_tokens},
              {"price_input_per_million", c.prices.input_per_million},
              {"price_output_per_million", c.prices.output_per_million},
              {"requests_per_second", c.requests_per_second},
              {"burst", c.burst},
              {"max_retries", c.retry.max_retries},
              {"initial_delay_ms", c.retry.initial_delay.count()}};
}

void validate_chat(const ChatRoleConfig& c, const std::string& where) {
  if (c.kind != ProviderKind::kRemote) return;
  if (c.url.empty() || c.model.empty()) fail(where, "remote provider needs url and model");
  if (c.max_tokens < 1) fail(where, "max_tokens must be >= 1");
  if (c.temperature < 0.0) fail(where, "temperature must be >= 0");
}

}  // namespace

const char* provider_kind_name(ProviderKind kind) {
  return kind == ProviderKind::kRemote ? "remote" : "scripted";
}

const char* judge_kind_name(JudgeKind kind) { return kind == JudgeKind::kLlm ? "llm" : "substring"; }

void ExperimentConfig::validate() const {
  if (corpus_path.empty()) fail("corpus", "path is required");
  if (queries_path.empty()) fail("queries", "path is required");
  if (n < 1) fail("retriever.n", "must be >= 1");
  if (parallelism < 1) fail("parallelism", "must be >= 1");
  if (attacks.empty() && !baseline) fail("attack.variants", "nothing to run: no attacks and no baseline");
  if (defenses.empty()) fail("defenses.cells", "at least one cell is required");
  if (max_spend < 0.0) fail("budget.max_spend", "must be >= 0");
  if (embedder.kind == ProviderKind::kScripted && embedder.dim < 1) fail("embedder.dim", "must be >= 1");
  if (embedder.kind == ProviderKind::kRemote && (embedder.url.empty() || embedder.model.empty())) {
    fail("embedder", "remote embedder needs url and model");
  }
  validate_chat(generator, "generator");
  validate_chat(attacker, "attacker");
  validate_chat(defender, "defender");
  validate_chat(judge_llm, "judge");
  try {
    attack.validate();
    DefenseConfig{DefenseKind::kNone, expansion_k, expanded_n, paraphrase_prompt}.validate();
  } catch (const Error& e) {
    fail("attack/defenses", e.what());
  }
  if (system_prompt.find(kContextsSlot) == std::string::npos ||
      system_prompt.find(kQuestionSlot) == std::string::npos) {
    fail("generator.system_prompt", "must contain {contexts} and {question}");
  }
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  check_keys(doc, "root",
             {"seed", "parallelism", "corpus", "queries", "retriever", "embedder", "generator", "attacker",
              "defender", "attack", "defenses", "judge", "budget", "baseline"});
  ExperimentConfig c;
  read(doc, "seed", c.seed, "root");
  read(doc, "parallelism", c.parallelism, "root");
  read(doc, "baseline", c.baseline, "root");

  if (!doc.contains("corpus")) fail("corpus", "section is required");
  check_keys(doc["corpus"], "corpus", {"path"});
  std::string corpus;
  read(doc["corpus"], "path", corpus, "corpus");
  if (corpus.empty()) fail("corpus.path", "is required");
  c.corpus_path = resolve(base_dir, corpus);

  if (!doc.contains("queries")) fail("queries", "section is required");
  check_keys(doc["queries"], "queries", {"path", "limit"});
  std::string queries;
  read(doc["queries"], "path", queries, "queries");
  if (queries.empty()) fail("queries.path", "is required");
  c.queries_path = resolve(base_dir, queries);
  read(doc["queries"], "limit", c.query_limit, "queries");

  if (doc.contains("retriever")) {
    const auto& r = doc["retriever"];
    check_keys(r, "retriever", {"n", "metric", "normalize"});
    read(r, "n", c.n, "retriever");
    std::string metric = metric_name(c.metric);
    read(r, "metric", metric, "retriever");
    try {
      c.metric = parse_metric(metric);
    } catch (const Error& e) {
      fail("retriever.metric", e.what());
    }
    read(r, "normalize", c.normalize, "retriever");
  }

  if (doc.contains("embedder")) {
    const auto& e = doc["embedder"];
    check_keys(e, "embedder", {"kind", "dim", "cache_path", "url", "model", "api_key_env", "batch_size",
                               "requests_per_second", "burst", "max_retries", "initial_delay_ms"});
    std::string kind = "offline";
    read(e, "kind", kind, "embedder");
    c.embedder.kind = parse_kind(kind, "embedder.kind");
    read(e, "dim", c.embedder.dim, "embedder");
    std::string cache;
    read(e, "cache_path", cache, "embedder");
    if (!cache.empty()) c.embedder.cache_path = resolve(base_dir, cache);
    read(e, "url", c.embedder.url, "embedder");
    read(e, "model", c.embedder.model, "embedder");
    read(e, "api_key_env", c.embedder.api_key_env, "embedder");
    read(e, "batch_size", c.embedder.batch_size, "embedder");
    read(e, "requests_per_second", c.embedder.requests_per_second, "embedder");
    read(e, "burst", c.embedder.burst, "embedder");
    read_retry(e, c.embedder.retry, "embedder");
    if (c.embedder.batch_size < 1) fail("embedder.batch_size", "must be >= 1");
  }

  if (doc.contains("generator")) {
    c.generator = parse_chat(doc["generator"], "generator", c.generator, {"system_prompt"});
    read(doc["generator"], "system_prompt", c.system_prompt, "generator");
  }
  c.attacker = doc.contains("attacker") ? parse_chat(doc["attacker"], "attacker", c.generator) : c.generator;
  c.defender = doc.contains("defender") ? parse_chat(doc["defender"], "defender", c.generator) : c.generator;
  c.judge_llm = c.generator;

  if (doc.contains("attack")) {
    const auto& a = doc["attack"];
    check_keys(a, "attack", {"variants", "order", "V", "L", "ablate", "prag_words", "prag_retries", "prag_prompt"});
    std::vector<std::string> variants;
    read(a, "variants", variants, "attack");
    if (a.contains("variants")) {
      c.attacks.clear();
      try {
        for (const auto& v : variants) c.attacks.push_back(parse_attack(v));
      } catch (const Error& e) {
        fail("attack.variants", e.what());
      }
    }
    std::string order = order_name(c.attack.order);
    read(a, "order", order, "attack");
    try {
      c.attack.order = parse_order(order);
    } catch (const Error& e) {
      fail("attack.order", e.what());
    }
    read(a, "V", c.attack.word_limit, "attack");
    read(a, "L", c.attack.max_attempts, "attack");
    std::string ablate;
    read(a, "ablate", ablate, "attack");
    if (!ablate.empty()) c.attack.ablate_keyword = ablate;
    read(a, "prag_words", c.attack.prag_words, "attack");
    read(a, "prag_retries", c.attack.prag_max_tries, "attack");
    read(a, "prag_prompt", c.attack.prag_prompt_template, "attack");
  }

  if (doc.contains("defenses")) {
    const auto& d = doc["defenses"];
    check_keys(d, "defenses", {"cells", "K", "expanded_n", "expansion_fixture", "paraphrase_prompt"});
    std::vector<std::string> cells;
    read(d, "cells", cells, "defenses");
    if (d.contains("cells")) {
      c.defenses.clear();
      try {
        for (const auto& cell : cells) c.defenses.push_back(parse_defense(cell));
      } catch (const Error& e) {
        fail("defenses.cells", e.what());
      }
    }
    read(d, "K", c.expansion_k, "defenses");
    read(d, "expanded_n", c.expanded_n, "defenses");
    std::string fixture;
    read(d, "expansion_fixture", fixture, "defenses");
    if (!fixture.empty()) c.expansion_fixture = resolve(base_dir, fixture);
    read(d, "paraphrase_prompt", c.paraphrase_prompt, "defenses");
  }

  if (doc.contains("judge")) {
    const auto& j = doc["judge"];
    std::string kind = "substring";
    read(j, "kind", kind, "judge");
    check_keys(j, "judge", {"kind", "provider"});
    if (kind == "substring") {
      c.judge = JudgeKind::kSubstring;
    } else if (kind == "llm") {
      c.judge = JudgeKind::kLlm;
      if (j.contains("provider")) c.judge_llm = parse_chat(j["provider"], "judge.provider", c.generator);
    } else {
      fail("judge.kind", "must be substring or llm, got '" + kind + "'");
    }
  }

  if (doc.contains("budget")) {
    const auto& b = doc["budget"];
    check_keys(b, "budget", {"max_calls", "max_spend"});
    read(b, "max_calls", c.max_calls, "budget");
    read(b, "max_spend", c.max_spend, "budget");
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, fs::absolute(path).parent_path());
}

void force_offline(ExperimentConfig& config) {
  config.embedder.kind = ProviderKind::kScripted;
  config.embedder.cache_path.reset();
  for (auto* role : {&config.generator, &config.attacker, &config.defender, &config.judge_llm}) {
    role->kind = ProviderKind::kScripted;
  }
  config.judge = JudgeKind::kSubstring;
}

void apply_overrides(ExperimentConfig& config, const json& o) {
  if (o.is_null()) return;
  check_keys(o, "overrides", {"defenses", "attacks", "n", "metric", "seed", "limit", "parallelism", "offline"});
  try {
    if (o.contains("defenses")) {
      config.defenses.clear();
      for (const auto& d : o["defenses"]) config.defenses.push_back(parse_defense(d.get<std::string>()));
    }
    if (o.contains("attacks")) {
      config.attacks.clear();
      for (const auto& a : o["attacks"]) config.attacks.push_back(parse_attack(a.get<std::string>()));
    }
    if (o.contains("metric")) config.metric = parse_metric(o["metric"].get<std::string>());
  } catch (const json::exception& e) {
    fail("overrides", e.what());
  } catch (const Error& e) {
    fail("overrides", e.what());
  }
  read(o, "n", config.n, "overrides");
  read(o, "seed", config.seed, "overrides");
  read(o, "limit", config.query_limit, "overrides");
  read(o, "parallelism", config.parallelism, "overrides");
  bool offline = false;
  read(o, "offline", offline, "overrides");
  if (offline) force_offline(config);
  config.validate();
}

json config_to_json(const ExperimentConfig& c) {
  json attacks = json::array();
  for (auto a : c.attacks) attacks.push_back(attack_name(a));
  json defenses = json::array();
  for (auto d : c.defenses) defenses.push_back(defense_name(d));

  json embedder{{"kind", c.embedder.kind == ProviderKind::kRemote ? "remote" : "offline"},
                {"dim", c.embedder.dim},
                {"cache_path", c.embedder.cache_path ? c.embedder.cache_path->string() : ""},
                {"url", c.embedder.url},
                {"model", c.embedder.model},
                {"api_key_env", c.embedder.api_key_env},
                {"batch_size", c.embedder.batch_size},
                {"requests_per_second", c.embedder.requests_per_second},
                {"burst", c.embedder.burst},
                {"max_retries", c.embedder.retry.max_retries},
                {"initial_delay_ms", c.embedder.retry.initial_delay.count()}};

  json generator = chat_to_json(c.generator);
  generator["system_prompt"] = c.system_prompt;
  json judge{{"kind", judge_kind_name(c.judge)}};
  if (c.judge == JudgeKind::kLlm) judge["provider"] = chat_to_json(c.judge_llm);

  return json{
      {"seed", c.seed},
      {"parallelism", c.parallelism},
      {"corpus", {{"path", c.corpus_path.string()}}},
      {"queries", {{"path", c.queries_path.string()}, {"limit", c.query_limit}}},
      {"retriever", {{"n", c.n}, {"metric", metric_name(c.metric)}, {"normalize", c.normalize}}},
      {"embedder", embedder},
      {"generator", generator},
      {"attacker", chat_to_json(c.attacker)},
      {"defender", chat_to_json(c.defender)},
      {"attack",
       {{"variants", attacks},
        {"order", order_name(c.attack.order)},
        {"V", c.attack.word_limit},
        {"L", c.attack.max_attempts},
        {"ablate", c.attack.ablate_keyword.value_or("")},
        {"prag_words", c.attack.prag_words},
        {"prag_retries", c.attack.prag_max_tries},
        {"prag_prompt", c.attack.prag_prompt_template}}},
      {"defenses",
       {{"cells", defenses},
        {"K", c.expansion_k},
        {"expanded_n", c.expanded_n},
        {"expansion_fixture", c.expansion_fixture ? c.expansion_fixture->string() : ""},
        {"paraphrase_prompt", c.paraphrase_prompt}}},
      {"judge", judge},
      {"budget", {{"max_calls", c.max_calls}, {"max_spend", c.max_spend}}},
      {"baseline", c.baseline},
  };
}

}  // namespace corruptrag
