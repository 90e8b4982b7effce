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

// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 configuration or input error, 2 provider or budget
// failure, 3 partial results emitted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "corruptrag/corruptrag.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitProvider = 2;
constexpr int kExitPartial = 3;

int exit_code_for(crag_status status) {
  switch (status) {
    case CRAG_OK: return kExitOk;
    case CRAG_ERR_PROVIDER:
    case CRAG_ERR_BUDGET: return kExitProvider;
    default: return kExitConfig;
  }
}

int report_failure(const char* what, crag_status status) {
  std::fprintf(stderr, "corruptrag: %s failed (%s): %s\n", what, crag_status_name(status), crag_last_error());
  return exit_code_for(status);
}

struct StoreDeleter {
  void operator()(crag_store* s) const { crag_store_free(s); }
};
struct ReportDeleter {
  void operator()(crag_report* r) const { crag_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { crag_string_free(s); }
};
using StorePtr = std::unique_ptr<crag_store, StoreDeleter>;
using ReportPtr = std::unique_ptr<crag_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(sep);
    out += p;
  }
  return out;
}

int emit(const crag_report* report, const std::vector<std::string>& formats, const std::string& out_prefix) {
  if (out_prefix.empty()) {
    char* raw = nullptr;
    auto st = crag_report_to_json(report, &raw);
    if (st != CRAG_OK) return report_failure("report rendering", st);
    StringPtr json(raw);
    std::fputs(json.get(), stdout);
  } else {
    auto st = crag_report_emit(report, join(formats, ',').c_str(), out_prefix.c_str());
    if (st != CRAG_OK) return report_failure("report emission", st);
  }
  if (!crag_report_complete(report)) {
    std::fprintf(stderr, "corruptrag: report is partial\n");
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus-poisoning attacks and defenses against retrieval-augmented generation"};
  app.set_version_flag("--version", std::string(crag_version()));
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a JSONL corpus and persist it as a store");
  std::string ingest_corpus, ingest_out;
  ingest->add_option("--corpus", ingest_corpus, "JSONL corpus with id/_id and text")->required();
  ingest->add_option("--out", ingest_out, "Store file to write")->required();

  // craft
  auto* craft = app.add_subcommand("craft", "Craft one poisoned text per targeted query");
  std::string craft_queries, craft_out, craft_attack = "as", craft_order, craft_ablate, craft_config;
  std::optional<int> craft_v, craft_l;
  bool craft_offline = false;
  craft->add_option("--queries", craft_queries, "JSONL targeted queries")->required();
  craft->add_option("--attack", craft_attack, "as | ak | pia | prag-bb")
      ->check(CLI::IsMember({"as", "ak", "pia", "prag-bb"}));
  craft->add_option("--order", craft_order, "Assembly order, e.g. sh:adv-state or hs:state-adv");
  craft->add_option("--ablate", craft_ablate, "Drop one keyword from an AS poison")
      ->check(CLI::IsMember({"outdated", "incorrect", "latest", "correct"}));
  craft->add_option("--V", craft_v, "Word limit for AK refinement");
  craft->add_option("--L", craft_l, "Maximum AK refinement attempts");
  craft->add_option("--config", craft_config, "Run config naming the providers");
  craft->add_flag("--offline", craft_offline, "Use scripted providers");
  craft->add_option("--out", craft_out, "Poisons JSONL to write")->required();

  // inject
  auto* inject = app.add_subcommand("inject", "Add crafted poisons to a store");
  std::string inject_store, inject_poisons, inject_out;
  inject->add_option("--store", inject_store, "Store file")->required();
  inject->add_option("--poisons", inject_poisons, "Poisons JSONL")->required();
  inject->add_option("--out", inject_out, "Store file to write")->required();

  // run
  auto* run = app.add_subcommand("run", "Run an attack x defense experiment");
  std::string run_config, run_out, run_metric;
  std::vector<std::string> run_defenses, run_attacks, run_formats{"json", "csv"};
  std::optional<std::size_t> run_n, run_limit;
  std::optional<std::uint64_t> run_seed;
  bool run_offline = false;
  run->add_option("--config", run_config, "Run config (JSON)")->required();
  run->add_option("--defense", run_defenses, "none | paraphrase | instructional | detection | expansion")
      ->delimiter(',');
  run->add_option("--attack", run_attacks, "as | ak | pia | prag-bb")->delimiter(',');
  run->add_option("--n", run_n, "Retrieval depth");
  run->add_option("--metric", run_metric, "dot | cosine")->check(CLI::IsMember({"dot", "cosine"}));
  run->add_option("--seed", run_seed, "Seed for query sampling and scripted providers");
  run->add_option("--limit", run_limit, "Sample this many queries");
  run->add_flag("--offline", run_offline, "Scripted providers and the offline embedder");
  run->add_option("--out", run_out, "Output prefix; JSON goes to stdout when omitted");
  run->add_option("--format", run_formats, "json, csv")->delimiter(',');

  // audit
  auto* audit = app.add_subcommand("audit", "Count top-n texts supporting the correct answer");
  std::string audit_config, audit_out;
  std::optional<std::size_t> audit_n;
  bool audit_offline = false;
  audit->add_option("--config", audit_config, "Run config (JSON)")->required();
  audit->add_option("--n", audit_n, "Retrieval depth");
  audit->add_flag("--offline", audit_offline, "Substring judge and the offline embedder");
  audit->add_option("--out", audit_out, "JSON file to write; stdout when omitted");

  // report
  auto* report = app.add_subcommand("report", "Re-emit a saved report in other formats");
  std::string report_in, report_out;
  std::vector<std::string> report_formats{"csv"};
  report->add_option("--in", report_in, "Report JSON")->required();
  report->add_option("--format", report_formats, "json, csv")->delimiter(',');
  report->add_option("--out", report_out, "Output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*ingest) {
    crag_store* raw = nullptr;
    auto st = crag_store_ingest_file(ingest_corpus.c_str(), &raw);
    if (st != CRAG_OK) return report_failure("ingest", st);
    StorePtr store(raw);
    st = crag_store_save(store.get(), ingest_out.c_str());
    if (st != CRAG_OK) return report_failure("store save", st);
    std::fprintf(stderr, "ingested %zu documents into %s\n", crag_store_size(store.get()), ingest_out.c_str());
    return kExitOk;
  }

  if (*craft) {
    nlohmann::json opts{{"attack", craft_attack}};
    if (!craft_order.empty()) opts["order"] = craft_order;
    if (!craft_ablate.empty()) opts["ablate"] = craft_ablate;
    if (craft_v) opts["V"] = *craft_v;
    if (craft_l) opts["L"] = *craft_l;
    if (!craft_config.empty()) opts["config"] = craft_config;
    if (craft_offline || craft_config.empty()) opts["offline"] = true;
    auto st = crag_craft(craft_queries.c_str(), opts.dump().c_str(), craft_out.c_str());
    if (st != CRAG_OK) return report_failure("craft", st);
    return kExitOk;
  }

  if (*inject) {
    crag_store* raw = nullptr;
    auto st = crag_store_load(inject_store.c_str(), &raw);
    if (st != CRAG_OK) return report_failure("store load", st);
    StorePtr store(raw);
    crag_store* raw_out = nullptr;
    st = crag_store_inject_file(store.get(), inject_poisons.c_str(), &raw_out);
    if (st != CRAG_OK) return report_failure("inject", st);
    StorePtr injected(raw_out);
    st = crag_store_save(injected.get(), inject_out.c_str());
    if (st != CRAG_OK) return report_failure("store save", st);
    std::fprintf(stderr, "store now holds %zu documents, %zu injected\n", crag_store_size(injected.get()),
                 crag_store_injected_count(injected.get()));
    return kExitOk;
  }

  if (*run) {
    nlohmann::json overrides = nlohmann::json::object();
    if (!run_defenses.empty()) overrides["defenses"] = run_defenses;
    if (!run_attacks.empty()) overrides["attacks"] = run_attacks;
    if (run_n) overrides["n"] = *run_n;
    if (!run_metric.empty()) overrides["metric"] = run_metric;
    if (run_seed) overrides["seed"] = *run_seed;
    if (run_limit) overrides["limit"] = *run_limit;
    if (run_offline) overrides["offline"] = true;
    crag_report* raw = nullptr;
    auto st = crag_run(run_config.c_str(), overrides.dump().c_str(), &raw);
    if (st != CRAG_OK) return report_failure("run", st);
    ReportPtr rep(raw);
    return emit(rep.get(), run_formats, run_out);
  }

  if (*audit) {
    nlohmann::json overrides = nlohmann::json::object();
    if (audit_n) overrides["n"] = *audit_n;
    if (audit_offline) overrides["offline"] = true;
    char* raw = nullptr;
    auto st = crag_audit(audit_config.c_str(), overrides.dump().c_str(), &raw);
    if (st != CRAG_OK) return report_failure("audit", st);
    StringPtr json(raw);
    if (audit_out.empty()) {
      std::fputs(json.get(), stdout);
    } else {
      std::ofstream out(audit_out, std::ios::binary);
      out << json.get();
      if (!out) {
        std::fprintf(stderr, "corruptrag: cannot write %s\n", audit_out.c_str());
        return kExitConfig;
      }
    }
    return kExitOk;
  }

  if (*report) {
    crag_report* raw = nullptr;
    auto st = crag_report_load(report_in.c_str(), &raw);
    if (st != CRAG_OK) return report_failure("report load", st);
    ReportPtr rep(raw);
    st = crag_report_emit(rep.get(), join(report_formats, ',').c_str(), report_out.c_str());
    if (st != CRAG_OK) return report_failure("report emission", st);
    return kExitOk;
  }
  return kExitConfig;
}
