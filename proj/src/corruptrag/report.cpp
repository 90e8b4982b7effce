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

#include "corruptrag/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "corruptrag/error.hpp"

namespace corruptrag {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json flags_to_json(const DefenseFlags& f) {
  return json{{"paraphrased_query", f.paraphrased_query ? json(*f.paraphrased_query) : json(nullptr)},
              {"paraphrase_fell_back", f.paraphrase_fell_back},
              {"hardened_prompt", f.hardened_prompt},
              {"detection_ran", f.detection_ran},
              {"flagged_ids", f.flagged_ids},
              {"poisons_judged", f.poisons_judged},
              {"poisons_flagged", f.poisons_flagged},
              {"label_parse_failures", f.label_parse_failures},
              {"expanded", f.expanded}};
}

DefenseFlags flags_from_json(const json& j) {
  DefenseFlags f;
  if (!j.at("paraphrased_query").is_null()) f.paraphrased_query = j.at("paraphrased_query").get<std::string>();
  f.paraphrase_fell_back = j.at("paraphrase_fell_back").get<bool>();
  f.hardened_prompt = j.at("hardened_prompt").get<bool>();
  f.detection_ran = j.at("detection_ran").get<bool>();
  f.flagged_ids = j.at("flagged_ids").get<std::vector<std::string>>();
  f.poisons_judged = j.at("poisons_judged").get<std::size_t>();
  f.poisons_flagged = j.at("poisons_flagged").get<std::size_t>();
  f.label_parse_failures = j.at("label_parse_failures").get<std::size_t>();
  f.expanded = j.at("expanded").get<bool>();
  return f;
}

json trial_to_json(const TrialOutcome& t) {
  return json{{"query_id", t.query_id},
              {"generated_answer", t.generated_answer},
              {"judged_match", t.judged_match},
              {"correct_match", t.correct_match ? json(*t.correct_match) : json(nullptr)},
              {"poison_injected", t.poison_injected},
              {"poison_rank", t.poison_rank ? json(*t.poison_rank) : json(nullptr)},
              {"retrieved_ids", t.retrieved_ids},
              {"contexts_used", t.contexts_used},
              {"defense_flags", flags_to_json(t.defense)},
              {"poison_verified", t.poison_verified ? json(*t.poison_verified) : json(nullptr)},
              {"poison_attempts", t.poison_attempts},
              {"error", t.error}};
}

TrialOutcome trial_from_json(const json& j) {
  TrialOutcome t;
  t.query_id = j.at("query_id").get<std::string>();
  t.generated_answer = j.at("generated_answer").get<std::string>();
  t.judged_match = j.at("judged_match").get<bool>();
  if (!j.at("correct_match").is_null()) t.correct_match = j.at("correct_match").get<bool>();
  t.poison_injected = j.at("poison_injected").get<bool>();
  if (!j.at("poison_rank").is_null()) t.poison_rank = j.at("poison_rank").get<std::size_t>();
  t.retrieved_ids = j.at("retrieved_ids").get<std::vector<std::string>>();
  t.contexts_used = j.at("contexts_used").get<std::vector<std::string>>();
  t.defense = flags_from_json(j.at("defense_flags"));
  if (!j.at("poison_verified").is_null()) t.poison_verified = j.at("poison_verified").get<bool>();
  t.poison_attempts = j.at("poison_attempts").get<int>();
  t.error = j.at("error").get<std::string>();
  return t;
}

json metrics_to_json(const MetricsSummary& m) {
  return json{{"asr", opt(m.asr)},           {"recall", opt(m.recall)}, {"precision", opt(m.precision)},
              {"f1", opt(m.f1)},             {"tpr", opt(m.tpr)},       {"accuracy", opt(m.accuracy)},
              {"n", m.n},                    {"trials", m.trials},      {"failed", m.failed}};
}

MetricsSummary metrics_from_json(const json& j) {
  MetricsSummary m;
  m.asr = opt_double(j.at("asr"));
  m.recall = opt_double(j.at("recall"));
  m.precision = opt_double(j.at("precision"));
  m.f1 = opt_double(j.at("f1"));
  m.tpr = opt_double(j.at("tpr"));
  m.accuracy = opt_double(j.at("accuracy"));
  m.n = j.at("n").get<std::size_t>();
  m.trials = j.at("trials").get<std::size_t>();
  m.failed = j.at("failed").get<std::size_t>();
  return m;
}

json ledger_to_json(const LedgerTotals& l) {
  return json{{"calls", l.calls},
              {"input_tokens", l.input_tokens},
              {"output_tokens", l.output_tokens},
              {"cost", l.total_cost}};
}

LedgerTotals ledger_from_json(const json& j) {
  LedgerTotals l;
  l.calls = j.at("calls").get<std::uint64_t>();
  l.input_tokens = j.at("input_tokens").get<std::uint64_t>();
  l.output_tokens = j.at("output_tokens").get<std::uint64_t>();
  l.total_cost = j.at("cost").get<double>();
  return l;
}

std::optional<double> metric_value(const MetricsSummary& m, std::string_view name) {
  if (name == "asr") return m.asr;
  if (name == "recall") return m.recall;
  if (name == "precision") return m.precision;
  if (name == "f1") return m.f1;
  if (name == "tpr") return m.tpr;
  return m.accuracy;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string render_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "attack,defense,n,trials,metric,value\n";
  char buf[64];
  for (const auto& cell : report.cells) {
    for (const char* name : kMetricNames) {
      auto v = metric_value(cell.metrics, name);
      std::string value = "NA";
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.6f", *v);
        value = buf;
      }
      out << csv_field(cell.attack) << ',' << csv_field(cell.defense) << ',' << cell.n << ','
          << cell.metrics.trials << ',' << name << ',' << value << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::size_t ExperimentReport::failed_trials() const {
  std::size_t failed = 0;
  for (const auto& c : cells) {
    failed += static_cast<std::size_t>(
        std::count_if(c.trials.begin(), c.trials.end(), [](const TrialOutcome& t) { return t.failed(); }));
  }
  return failed;
}

bool ExperimentReport::partial() const {
  if (!complete || failed_trials() > 0) return true;
  for (const auto& c : cells) {
    if (!c.complete) return true;
  }
  return false;
}

const CellReport* ExperimentReport::find_cell(std::string_view attack, std::string_view defense) const {
  for (const auto& c : cells) {
    if (c.attack == attack && c.defense == defense) return &c;
  }
  return nullptr;
}

json report_to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json trials = json::array();
    for (const auto& t : c.trials) trials.push_back(trial_to_json(t));
    json cell{{"attack", c.attack},
              {"defense", c.defense},
              {"n", c.n},
              {"complete", c.complete},
              {"metrics", metrics_to_json(c.metrics)},
              {"trials", std::move(trials)}};
    if (c.verified) cell["verified"] = metrics_to_json(*c.verified);
    if (c.unverified) cell["unverified"] = metrics_to_json(*c.unverified);
    cells.push_back(std::move(cell));
  }
  json ledgers = json::object();
  for (const auto& [name, totals] : report.ledgers) ledgers[name] = ledger_to_json(totals);
  return json{{"format", "corruptrag-report"},
              {"version", report.version},
              {"seed", report.seed},
              {"complete", report.complete},
              {"partial", report.partial()},
              {"abort_reason", report.abort_reason},
              {"caveats", report.caveats},
              {"warnings", report.warnings},
              {"config", report.config},
              {"providers", report.providers},
              {"ledgers", std::move(ledgers)},
              {"ledger_total", ledger_to_json(report.ledger_total)},
              {"cells", std::move(cells)}};
}

ExperimentReport report_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "corruptrag-report") {
      throw Error(ErrorCode::kSchema, "not a corruptrag report");
    }
    ExperimentReport r;
    r.version = doc.at("version").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.complete = doc.at("complete").get<bool>();
    r.abort_reason = doc.at("abort_reason").get<std::string>();
    r.caveats = doc.at("caveats").get<std::vector<std::string>>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    r.config = doc.at("config");
    r.providers = doc.at("providers").get<std::map<std::string, std::string>>();
    for (const auto& [name, totals] : doc.at("ledgers").items()) r.ledgers[name] = ledger_from_json(totals);
    r.ledger_total = ledger_from_json(doc.at("ledger_total"));
    for (const auto& c : doc.at("cells")) {
      CellReport cell;
      cell.attack = c.at("attack").get<std::string>();
      cell.defense = c.at("defense").get<std::string>();
      cell.n = c.at("n").get<std::size_t>();
      cell.complete = c.at("complete").get<bool>();
      cell.metrics = metrics_from_json(c.at("metrics"));
      if (c.contains("verified")) cell.verified = metrics_from_json(c["verified"]);
      if (c.contains("unverified")) cell.unverified = metrics_from_json(c["unverified"]);
      for (const auto& t : c.at("trials")) cell.trials.push_back(trial_from_json(t));
      r.cells.push_back(std::move(cell));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

ExperimentReport load_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "report '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return report_from_json(doc);
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown report format '" + std::string(name) + "' (supported: json, csv)");
}

const char* report_format_extension(ReportFormat format) {
  return format == ReportFormat::kCsv ? "csv" : "json";
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::kCsv) return render_csv(report);
  return report_to_json(report).dump(2) + "\n";
}

std::vector<fs::path> emit_report(const ExperimentReport& report, const std::vector<std::string>& formats,
                                  const fs::path& out_prefix) {
  std::vector<ReportFormat> parsed;
  for (const auto& f : formats) parsed.push_back(parse_report_format(f));
  if (out_prefix.has_parent_path()) fs::create_directories(out_prefix.parent_path());
  std::vector<fs::path> written;
  for (auto format : parsed) {
    fs::path path = out_prefix;
    path += std::string(".") + report_format_extension(format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    out << render_report(report, format);
    if (!out) throw Error(ErrorCode::kIo, "write failure on '" + path.string() + "'");
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace corruptrag
