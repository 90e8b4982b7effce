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

#include "corruptrag/experiment.hpp"

#include <algorithm>
#include <mutex>
#include <random>

#include "corruptrag/attacks.hpp"
#include "corruptrag/defenses.hpp"
#include "corruptrag/embedding_cache.hpp"
#include "corruptrag/error.hpp"
#include "corruptrag/generator.hpp"
#include "corruptrag/judge.hpp"
#include "corruptrag/parallel.hpp"
#include "corruptrag/remote.hpp"
#include "corruptrag/retriever.hpp"
#include "corruptrag/scripted.hpp"

namespace corruptrag {

using json = nlohmann::json;

namespace {

RemoteEndpoint endpoint_for(const ChatRoleConfig& c) {
  RemoteEndpoint e;
  e.url = c.url;
  e.model = c.model;
  e.api_key = resolve_api_key(c.api_key_env);
  e.retry = c.retry;
  e.requests_per_second = c.requests_per_second;
  e.burst = c.burst;
  return e;
}

std::shared_ptr<ChatProvider> remote_or_null(const ChatRoleConfig& c) {
  if (c.kind != ProviderKind::kRemote) return nullptr;
  return std::make_shared<RemoteChatProvider>(endpoint_for(c), c.temperature, c.max_tokens);
}

// One cost ledger per role. Roles that made no calls are left out of the report.
class Ledgers {
 public:

  std::shared_ptr<CostLedger> get(const std::string& name, const TokenPrices& prices) {
    std::lock_guard lock(mu_);
    auto& slot = ledgers_[name];
    if (!slot) slot = std::make_shared<CostLedger>(prices);
    return slot;
  }

  void fill(ExperimentReport& report) const {
    std::lock_guard lock(mu_);
    LedgerTotals total;
    for (const auto& [name, ledger] : ledgers_) {
      auto t = ledger->totals();
      if (t.calls == 0) continue;
      report.ledgers[name] = t;
      total.calls += t.calls;
      total.input_tokens += t.input_tokens;
      total.output_tokens += t.output_tokens;
      total.total_cost += t.total_cost;
    }
    report.ledger_total = total;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<CostLedger>> ledgers_;
};

// Roles resolved for one run: clients bound to ledgers plus scripted doubles.
struct Runtime {
  const ExperimentConfig& config;
  Embedder& embedder;
  std::shared_ptr<Generator> generator;
  ChatClient refiner;
  ChatClient writer;
  ChatClient paraphraser;
  ChatClient detector;
  ChatClient expansion_writer;
  std::unique_ptr<AnswerJudge> judge;
};

ChatClient bind_role(const std::shared_ptr<ChatProvider>& provider, std::shared_ptr<ChatProvider> fallback,
                Ledgers& ledgers, const std::string& ledger_name, const TokenPrices& prices,
                const std::shared_ptr<Budget>& budget) {
  auto p = provider ? provider : std::move(fallback);
  // Scripted doubles are free and never count against the budget.
  auto b = provider ? budget : nullptr;
  return ChatClient(p, ledgers.get(ledger_name, prices), b);
}

Runtime make_runtime(const ExperimentConfig& config, const Providers& providers,
                     const std::vector<TargetedQuery>& queries, Ledgers& ledgers) {
  Runtime rt{config, *providers.embedder, nullptr, {}, {}, {}, {}, {}, nullptr};
  if (providers.generator) {
    rt.generator = std::make_shared<LlmGenerator>(
        ChatClient(providers.generator, ledgers.get("generate", config.generator.prices), providers.budget));
  } else {
    rt.generator = std::make_shared<ScriptedGenerator>(ScriptedGenerator::for_queries(queries));
  }
  rt.refiner = bind_role(providers.refiner, scripted::ak_refiner(), ledgers, "craft:ak", config.attacker.prices,
                    providers.budget);
  rt.writer = bind_role(providers.writer, scripted::poisonedrag_writer(), ledgers, "craft:prag-bb",
                   config.attacker.prices, providers.budget);
  rt.paraphraser = bind_role(providers.paraphraser, scripted::word_shuffle_paraphraser(config.seed), ledgers,
                        "defense:paraphrase", config.defender.prices, providers.budget);
  rt.detector = bind_role(providers.detector, scripted::instruction_detector(), ledgers, "defense:detection",
                     config.defender.prices, providers.budget);
  rt.expansion_writer = bind_role(providers.expansion_writer, scripted::expansion_writer(), ledgers,
                             "defense:expansion", config.defender.prices, providers.budget);
  if (providers.judge) {
    rt.judge = std::make_unique<LlmAnswerJudge>(
        ChatClient(providers.judge, ledgers.get("judge", config.judge_llm.prices), providers.budget));
  } else {
    rt.judge = std::make_unique<NormalizedAnswerJudge>();
  }
  return rt;
}

struct CraftedPoison {
  std::optional<PoisonedText> poison;
  std::string error;
};

struct CellPlan {
  DefenseKind defense = DefenseKind::kNone;
  const EmbeddedStore* index = nullptr;
  std::size_t n = 0;
  bool attacked = false;
  bool baseline = false;
};

TrialOutcome run_trial(Runtime& rt, const TargetedQuery& q, const CellPlan& plan, const CraftedPoison* crafted) {
  TrialOutcome out;
  out.query_id = q.id;
  if (crafted) {
    if (!crafted->error.empty()) {
      out.error = "crafting failed: " + crafted->error;
      return out;
    }
    out.poison_injected = true;
    out.poison_verified = crafted->poison->verified;
    out.poison_attempts = crafted->poison->attempts_used;
  }
  try {
    std::string retrieval_text = q.question;
    if (plan.defense == DefenseKind::kParaphrasing) {
      auto para = paraphrase_query(q.question, rt.paraphraser, rt.config.paraphrase_prompt);
      retrieval_text = para.text;
      out.defense.paraphrased_query = para.text;
      out.defense.paraphrase_fell_back = para.fell_back;
    }
    auto result = retrieve_top_n(retrieval_text, *plan.index, plan.n, rt.config.metric, rt.embedder, q.id);
    out.retrieved_ids = result.doc_ids();
    if (out.poison_injected) out.poison_rank = result.rank_of(poison_doc_id(q.id));

    const auto& store = plan.index->store();
    std::vector<JudgedContext> contexts;
    for (const auto& id : out.retrieved_ids) {
      const auto* doc = store.find(id);
      contexts.push_back({id, doc->text, doc->origin.is_injected()});
    }
    if (plan.defense == DefenseKind::kLlmDetection) {
      auto det = detect_and_filter(contexts, rt.detector);
      out.defense.detection_ran = true;
      out.defense.poisons_judged = det.positives;
      out.defense.poisons_flagged = det.true_positives;
      out.defense.label_parse_failures = det.parse_failures;
      for (const auto& f : det.flagged) out.defense.flagged_ids.push_back(f.doc_id);
      contexts = std::move(det.kept);
    }
    out.defense.expanded = plan.defense == DefenseKind::kKnowledgeExpansion;

    GenerationRequest request;
    request.system_prompt = rt.config.system_prompt;
    if (plan.defense == DefenseKind::kInstructionalPrevention) {
      request.system_prompt = harden_system_prompt(request.system_prompt);
      out.defense.hardened_prompt = true;
    }
    request.question = q.question;
    for (const auto& c : contexts) {
      out.contexts_used.push_back(c.doc_id);
      request.contexts.push_back(c.text);
    }
    out.generated_answer = rt.generator->answer(request);
    out.judged_match = judge_match(out.generated_answer, q.targeted_answer, *rt.judge);
    if (plan.baseline) out.correct_match = judge_match(out.generated_answer, q.correct_answer, *rt.judge);
  } catch (const BudgetExhausted&) {
    throw;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

// Runs every trial of one cell. Completed rows survive a budget abort.
CellReport run_cell(Runtime& rt, const std::vector<TargetedQuery>& queries, const CellPlan& plan,
                    const std::string& attack, const std::vector<CraftedPoison>* crafted,
                    std::optional<std::string>& abort_reason) {
  std::vector<std::optional<TrialOutcome>> rows(queries.size());
  try {
    parallel_for(queries.size(), rt.config.parallelism, [&](std::size_t i) {
      rows[i] = run_trial(rt, queries[i], plan, crafted ? &(*crafted)[i] : nullptr);
    });
  } catch (const BudgetExhausted& e) {
    abort_reason = e.what();
  }
  CellReport cell;
  cell.attack = attack;
  cell.defense = defense_name(plan.defense);
  cell.n = plan.n;
  for (auto& r : rows) {
    if (r) {
      cell.trials.push_back(std::move(*r));
    } else {
      cell.complete = false;
    }
  }
  if (!cell.trials.empty()) {
    cell.metrics = compute_metrics(cell.trials, plan.n);
    if (attack == attack_name(AttackKind::kAK)) {
      std::vector<TrialOutcome> verified, unverified;
      for (const auto& t : cell.trials) {
        if (t.poison_verified == true) verified.push_back(t);
        if (t.poison_verified == false) unverified.push_back(t);
      }
      if (!verified.empty()) cell.verified = compute_metrics(verified, plan.n);
      if (!unverified.empty()) cell.unverified = compute_metrics(unverified, plan.n);
    }
  } else {
    cell.metrics.n = plan.n;
  }
  return cell;
}

std::vector<CraftedPoison> craft_all(Runtime& rt, const std::vector<TargetedQuery>& queries, AttackConfig ac) {
  if (ac.kind != AttackKind::kAS) ac.ablate_keyword.reset();
  CraftingContext ctx;
  ctx.llm = ac.kind == AttackKind::kAK ? &rt.refiner : &rt.writer;
  ctx.verifier = rt.generator.get();
  ctx.judge = rt.judge.get();
  std::vector<CraftedPoison> out(queries.size());
  parallel_for(queries.size(), rt.config.parallelism, [&](std::size_t i) {
    try {
      out[i].poison = craft(queries[i], ac, ctx);
    } catch (const BudgetExhausted&) {
      throw;
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

void collect_warnings(const CellReport& cell, std::vector<std::string>& warnings) {
  std::size_t fallbacks = 0, label_failures = 0, failures = 0, unverified = 0;
  for (const auto& t : cell.trials) {
    if (t.defense.paraphrase_fell_back) ++fallbacks;
    label_failures += t.defense.label_parse_failures;
    if (t.failed()) ++failures;
    if (t.poison_verified == false) ++unverified;
  }
  auto prefix = cell.attack + "/" + cell.defense + ": ";
  if (fallbacks) warnings.push_back(prefix + std::to_string(fallbacks) + " paraphrase fallbacks to the original query");
  if (label_failures) {
    warnings.push_back(prefix + std::to_string(label_failures) + " detection replies without a label (kept)");
  }
  if (failures) warnings.push_back(prefix + std::to_string(failures) + " failed trials");
  if (unverified && cell.defense == "none") {
    warnings.push_back(prefix + std::to_string(unverified) + " poisons injected without passing verification");
  }
}

}  // namespace

Providers make_providers(const ExperimentConfig& config) {
  Providers p;
  p.budget = std::make_shared<Budget>(config.max_calls, config.max_spend);
  std::shared_ptr<Embedder> base;
  if (config.embedder.kind == ProviderKind::kRemote) {
    RemoteEndpoint e;
    e.url = config.embedder.url;
    e.model = config.embedder.model;
    e.api_key = resolve_api_key(config.embedder.api_key_env);
    e.retry = config.embedder.retry;
    e.requests_per_second = config.embedder.requests_per_second;
    e.burst = config.embedder.burst;
    base = std::make_shared<RemoteEmbedder>(e, config.embedder.batch_size, config.parallelism, nullptr, p.budget);
  } else {
    base = std::make_shared<OfflineEmbedder>(config.embedder.dim);
  }
  p.embedder = std::make_shared<CachedEmbedder>(base, config.embedder.cache_path);
  p.generator = remote_or_null(config.generator);
  p.refiner = remote_or_null(config.attacker);
  p.writer = p.refiner;
  p.paraphraser = remote_or_null(config.defender);
  p.detector = p.paraphraser;
  p.expansion_writer = p.paraphraser;
  if (config.judge == JudgeKind::kLlm) {
    p.judge = remote_or_null(config.judge_llm);
    if (!p.judge) throw Error(ErrorCode::kConfig, "judge kind llm needs a remote provider");
  }
  return p;
}

CraftBatch craft_poisons(const std::vector<TargetedQuery>& queries, const AttackConfig& attack,
                         const ExperimentConfig& config, const Providers& providers) {
  attack.validate();
  if (!providers.embedder) throw Error(ErrorCode::kConfig, "no embedder configured");
  Ledgers ledgers;
  Runtime rt = make_runtime(config, providers, queries, ledgers);
  auto crafted = craft_all(rt, queries, attack);
  CraftBatch out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (crafted[i].poison) {
      out.poisons.push_back(std::move(*crafted[i].poison));
    } else {
      out.failures.emplace_back(queries[i].id, crafted[i].error);
    }
  }
  return out;
}

std::vector<TargetedQuery> select_queries(const ExperimentConfig& config) {
  auto queries = load_queries_file(config.queries_path);
  if (queries.empty()) throw Error(ErrorCode::kConfig, "query file '" + config.queries_path.string() + "' is empty");
  if (config.query_limit > 0 && config.query_limit < queries.size()) {
    std::mt19937_64 rng(config.seed);
    std::shuffle(queries.begin(), queries.end(), rng);
    queries.resize(config.query_limit);
  }
  std::sort(queries.begin(), queries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return queries;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, make_providers(config));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Providers& providers) {
  config.validate();
  if (!providers.embedder) throw Error(ErrorCode::kConfig, "no embedder configured");
  auto queries = select_queries(config);
  auto clean = ingest_corpus_file(config.corpus_path);

  Ledgers ledgers;
  Runtime rt = make_runtime(config, providers, queries, ledgers);

  ExperimentReport report;
  report.seed = config.seed;
  report.config = config_to_json(config);
  report.providers = {{"embedder", providers.embedder->provider_id() + "/" + providers.embedder->model_id()},
                      {"generator", rt.generator->name()},
                      {"refiner", rt.refiner.provider().id()},
                      {"writer", rt.writer.provider().id()},
                      {"paraphraser", rt.paraphraser.provider().id()},
                      {"detector", rt.detector.provider().id()},
                      {"expansion_writer", rt.expansion_writer.provider().id()},
                      {"judge", rt.judge->name()}};
  if (config.judge == JudgeKind::kLlm) {
    report.caveats.push_back(
        "ASR is decided by an LLM judge whose prompt was written for this tool; compare with other "
        "published numbers with care.");
  }
  if (providers.generator) {
    report.caveats.push_back("generation ran at temperature " + std::to_string(config.generator.temperature) +
                             " with max_tokens " + std::to_string(config.generator.max_tokens) + ".");
  } else {
    report.caveats.push_back("generation used the scripted rule-based generator, not a language model.");
  }

  std::optional<std::string> abort_reason;
  auto finish = [&]() {
    ledgers.fill(report);
    if (abort_reason) {
      report.complete = false;
      report.abort_reason = *abort_reason;
    }
    return report;
  };
  auto add_cell = [&](CellReport cell) {
    collect_warnings(cell, report.warnings);
    if (!cell.trials.empty() || !cell.complete) report.cells.push_back(std::move(cell));
  };

  try {
    auto clean_index = EmbeddedStore::build(clean, rt.embedder, config.normalize);
    if (config.baseline) {
      CellPlan plan{DefenseKind::kNone, &clean_index, config.n, false, true};
      add_cell(run_cell(rt, queries, plan, std::string(kBaselineAttack), nullptr, abort_reason));
      if (abort_reason) return finish();
    }

    std::vector<Document> expansion_docs;
    bool wants_expansion = std::find(config.defenses.begin(), config.defenses.end(),
                                     DefenseKind::kKnowledgeExpansion) != config.defenses.end();
    if (wants_expansion && !config.attacks.empty()) {
      BenignSource source;
      if (config.expansion_fixture) source.fixture = load_expansion_fixture(*config.expansion_fixture);
      source.writer = &rt.expansion_writer;
      auto only = expand_knowledge(StoreSnapshot(), queries, config.expansion_k, source);
      expansion_docs.assign(only.documents().begin(), only.documents().end());
    }

    for (auto kind : config.attacks) {
      AttackConfig ac = config.attack;
      ac.kind = kind;
      auto crafted = craft_all(rt, queries, ac);
      std::vector<Injection> injections;
      for (const auto& c : crafted) {
        if (c.poison) injections.push_back(to_injection(*c.poison));
      }
      auto attacked = inject(clean, injections);
      auto attacked_index = EmbeddedStore::build(attacked, rt.embedder, config.normalize);
      std::optional<EmbeddedStore> expanded_index;

      for (auto defense : config.defenses) {
        CellPlan plan{defense, &attacked_index, config.n, true, false};
        if (defense == DefenseKind::kKnowledgeExpansion) {
          if (!expanded_index) {
            expanded_index = EmbeddedStore::build(append_benign(attacked, expansion_docs), rt.embedder,
                                                  config.normalize);
          }
          plan.index = &*expanded_index;
          plan.n = config.expanded_n;
        }
        add_cell(run_cell(rt, queries, plan, attack_name(kind), &crafted, abort_reason));
        if (abort_reason) return finish();
      }
    }
  } catch (const BudgetExhausted& e) {
    abort_reason = e.what();
  }
  return finish();
}

AuditResult run_audit(const ExperimentConfig& config, const Providers& providers) {
  config.validate();
  if (!providers.embedder) throw Error(ErrorCode::kConfig, "no embedder configured");
  auto queries = select_queries(config);
  auto clean = ingest_corpus_file(config.corpus_path);
  auto index = EmbeddedStore::build(clean, *providers.embedder, config.normalize);

  std::unique_ptr<RelevanceJudge> judge;
  if (providers.judge) {
    judge = std::make_unique<LlmRelevanceJudge>(
        ChatClient(providers.judge, std::make_shared<CostLedger>(config.judge_llm.prices), providers.budget));
  } else {
    judge = std::make_unique<SubstringRelevanceJudge>();
  }

  AuditResult audit;
  audit.judge = judge->name();
  audit.n = config.n;
  std::vector<std::size_t> counts(queries.size());
  std::mutex judge_mu;
  parallel_for(queries.size(), config.parallelism, [&](std::size_t i) {
    auto result = retrieve_top_n(queries[i].question, index, config.n, config.metric, *providers.embedder,
                                 queries[i].id);
    std::lock_guard lock(judge_mu);
    counts[i] = relevance_audit(queries[i], result, clean, *judge);
  });
  for (std::size_t i = 0; i <= config.n; ++i) audit.histogram[i] = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    audit.counts[queries[i].id] = counts[i];
    ++audit.histogram[counts[i]];
  }
  return audit;
}

json audit_to_json(const AuditResult& audit) {
  json histogram = json::object();
  for (const auto& [k, v] : audit.histogram) histogram[std::to_string(k)] = v;
  return json{{"judge", audit.judge}, {"n", audit.n}, {"counts", audit.counts}, {"histogram", histogram}};
}

}  // namespace corruptrag
