// Copyright 2026 The PromptGauntlet Authors.
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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gauntlet/tournament_state.hpp"

namespace gauntlet::report {

struct MatrixRow {
  std::string template_a;
  std::string name_a;
  std::string template_b;
  std::string name_b;
  double prob_a_beats_b = 0.5;
  std::int64_t trials = 0;
  bool operator==(const MatrixRow&) const = default;
};

// One row per unordered pair of registered templates, A being the
// higher-ranked member. Rows are ordered by A's standing, then B's.
std::vector<MatrixRow> win_matrix(const TournamentState& state);

struct CountSummary {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> sd;  // sample SD; needs count >= 2
};

CountSummary summarize_counts(std::span<const std::int64_t> counts);

struct JudgeRow {
  std::string judge_id;
  std::string display_name;
  std::int64_t decisions = 0;
  std::int64_t skips = 0;
  std::int64_t target_decisions = 0;
};

struct JudgeSummary {
  std::vector<JudgeRow> judges;
  CountSummary decisions;
  std::int64_t total_skips = 0;
};

// Configured judges in config order, then any judge seen only in the log.
JudgeSummary judge_summary(const TournamentState& state);

enum class ReportFormat { kMarkdown, kCsv };

// Throws Error(kUnknownFormat).
ReportFormat parse_report_format(std::string_view text);

struct ReportFile {
  std::string filename;
  std::string content;
};

// Markdown: one report.md. CSV: standings.csv, matrix.csv, judges.csv.
std::vector<ReportFile> export_report(const TournamentState& state, ReportFormat format);

std::string render_markdown(const TournamentState& state);
std::string csv_field(std::string_view value);
std::string format_fixed(double value, int decimals);
std::string format_full(double value);

// Payloads for the operator endpoints.
nlohmann::json standings_json(const TournamentState& state);
nlohmann::json matrix_json(const TournamentState& state);
nlohmann::json progress_json(const TournamentState& state);

}  // namespace gauntlet::report
