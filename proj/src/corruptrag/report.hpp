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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corruptrag/metrics.hpp"
#include "corruptrag/provider.hpp"

namespace corruptrag {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kBaselineAttack = "baseline";
inline constexpr const char* kMetricNames[] = {"asr", "recall", "precision", "f1", "tpr", "accuracy"};

struct CellReport {
  std::string attack;   // attack name, or "baseline" for the clean run
  std::string defense;
  std::size_t n = 0;
  bool complete = true;
  MetricsSummary metrics;
  std::optional<MetricsSummary> verified;    // AK only: split by verification outcome
  std::optional<MetricsSummary> unverified;
  std::vector<TrialOutcome> trials;          // sorted by query_id

  bool operator==(const CellReport&) const = default;
};

struct ExperimentReport {
  std::string version{kVersion};
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::map<std::string, std::string> providers;  // role -> provider id
  std::vector<CellReport> cells;
  std::map<std::string, LedgerTotals> ledgers;
  LedgerTotals ledger_total;
  bool complete = true;
  std::string abort_reason;
  std::vector<std::string> warnings;
  std::vector<std::string> caveats;

  std::size_t failed_trials() const;
  // Incomplete cells, failed trials or an abort.
  bool partial() const;
  const CellReport* find_cell(std::string_view attack, std::string_view defense) const;
};

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);
ExperimentReport load_report(const std::filesystem::path& path);

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_report_format(std::string_view name);  // error lists the supported tokens
const char* report_format_extension(ReportFormat format);

// Byte-stable for an identical report.
std::string render_report(const ExperimentReport& report, ReportFormat format);

// Writes <out_prefix>.<ext> per format and returns the paths written.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::vector<std::string>& formats,
                                               const std::filesystem::path& out_prefix);

}  // namespace corruptrag
