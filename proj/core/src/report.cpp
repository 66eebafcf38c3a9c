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

#include "gauntlet/report.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "gauntlet/error.hpp"
#include "gauntlet/rating.hpp"
#include "gauntlet/scheduler.hpp"

namespace gauntlet::report {
namespace {

constexpr std::string_view kCrlf = "\r\n";
constexpr std::string_view kUndefined = "—";

std::int64_t trials_for(const TournamentState& state, const TemplatePair& pair) {
  const auto it = state.pair_trials.find(pair);
  return it == state.pair_trials.end() ? 0 : it->second;
}

std::string optional_fixed(const std::optional<double>& v) {
  return v ? format_fixed(*v, 2) : std::string(kUndefined);
}

std::string md_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<MatrixRow> win_matrix(const TournamentState& state) {
  const std::vector<scheduler::Standing> order = scheduler::standings(state);
  std::vector<MatrixRow> rows;
  rows.reserve(order.size() * (order.size() - (order.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& a = order[i];
      const auto& b = order[j];
      rows.push_back({a.template_id, a.name, b.template_id, b.name,
                      rating::win_probability(a.state, b.state, state.config.rating),
                      trials_for(state, TemplatePair::of(a.template_id, b.template_id))});
    }
  }
  return rows;
}

CountSummary summarize_counts(std::span<const std::int64_t> counts) {
  CountSummary out;
  out.count = counts.size();
  if (counts.empty()) return out;
  const double n = static_cast<double>(counts.size());
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c);
  out.mean = sum / n;
  if (counts.size() >= 2) {
    double ss = 0.0;
    for (auto c : counts) {
      const double d = static_cast<double>(c) - *out.mean;
      ss += d * d;
    }
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

JudgeSummary judge_summary(const TournamentState& state) {
  JudgeSummary out;
  std::set<std::string, std::less<>> listed;
  const auto add = [&](const std::string& id, const std::string& name) {
    JudgeRow row{id, name, 0, 0, state.config.target_decisions};
    if (const auto it = state.judge_tallies.find(id); it != state.judge_tallies.end()) {
      row.decisions = it->second.decisions;
      row.skips = it->second.skips;
    }
    out.total_skips += row.skips;
    out.judges.push_back(std::move(row));
    listed.insert(id);
  };
  for (const auto& judge : state.config.judges) add(judge.judge_id, judge.display_name);
  for (const auto& [id, tally] : state.judge_tallies) {
    if (!listed.contains(id)) add(id, id);
  }
  std::vector<std::int64_t> counts;
  for (const auto& row : out.judges) counts.push_back(row.decisions);
  out.decisions = summarize_counts(counts);
  return out;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  if (text == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kUnknownFormat, "unknown report format '" + std::string(text) + "'");
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_markdown(const TournamentState& state) {
  std::string out;
  out += "# Tournament report";
  if (!state.config.name.empty()) out += ": " + md_cell(state.config.name);
  out += "\n\n## Standings\n\n";
  out += "| Rank | Prompt | Rating | RD | Volatility | Games |\n";
  out += "|---:|---|---:|---:|---:|---:|\n";
  int rank = 0;
  for (const auto& s : scheduler::standings(state)) {
    out += "| " + std::to_string(++rank) + " | " + md_cell(s.name) + " | " +
           format_fixed(s.state.rating, 2) + " | " + format_fixed(s.state.rd, 2) + " | " +
           format_fixed(s.state.sigma, 4) + " | " + std::to_string(s.games) + " |\n";
  }

  out += "\n## Pairwise win probabilities\n\n";
  out += "| Prompt A | Prompt B | Prob A > B | Trials |\n";
  out += "|---|---|---:|---:|\n";
  for (const auto& row : win_matrix(state)) {
    out += "| " + md_cell(row.name_a) + " | " + md_cell(row.name_b) + " | " +
           format_fixed(row.prob_a_beats_b, 2) + " | " + std::to_string(row.trials) + " |\n";
  }

  const JudgeSummary judges = judge_summary(state);
  out += "\n## Judges\n\n";
  out += "| Judge | Decisions | Skips |\n";
  out += "|---|---:|---:|\n";
  for (const auto& row : judges.judges) {
    out += "| " + md_cell(row.display_name) + " | " + std::to_string(row.decisions) + " | " +
           std::to_string(row.skips) + " |\n";
  }
  out += "\nJudges: " + std::to_string(judges.decisions.count) +
         "; decisions per judge mean " + optional_fixed(judges.decisions.mean) + ", SD " +
         optional_fixed(judges.decisions.sd) + "; total skips " +
         std::to_string(judges.total_skips) + ".\n";
  return out;
}

std::vector<ReportFile> export_report(const TournamentState& state, ReportFormat format) {
  if (format == ReportFormat::kMarkdown) return {{"report.md", render_markdown(state)}};

  const auto line = [](std::initializer_list<std::string> fields) {
    std::string out;
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out += ',';
      out += csv_field(f);
      first = false;
    }
    out += kCrlf;
    return out;
  };

  std::string standings = line({"template_id", "name", "rating", "rd", "sigma", "games"});
  for (const auto& s : scheduler::standings(state)) {
    standings += line({s.template_id, s.name, format_full(s.state.rating),
                       format_full(s.state.rd), format_full(s.state.sigma),
                       std::to_string(s.games)});
  }

  std::string matrix = line({"Prompt A", "Prompt B", "Prob A > B", "Trials"});
  for (const auto& row : win_matrix(state)) {
    matrix += line({row.template_a, row.template_b, format_full(row.prob_a_beats_b),
                    std::to_string(row.trials)});
  }

  const JudgeSummary summary = judge_summary(state);
  std::string judges = line({"judge_id", "display_name", "decisions", "skips"});
  for (const auto& row : summary.judges) {
    judges += line({row.judge_id, row.display_name, std::to_string(row.decisions),
                    std::to_string(row.skips)});
  }

  return {{"standings.csv", std::move(standings)},
          {"matrix.csv", std::move(matrix)},
          {"judges.csv", std::move(judges)}};
}

nlohmann::json standings_json(const TournamentState& state) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : scheduler::standings(state)) {
    rows.push_back({{"template_id", s.template_id},
                    {"name", s.name},
                    {"rating", s.state.rating},
                    {"rd", s.state.rd},
                    {"sigma", s.state.sigma},
                    {"games", s.games}});
  }
  return {{"standings", std::move(rows)}};
}

nlohmann::json matrix_json(const TournamentState& state) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : win_matrix(state)) {
    rows.push_back({{"template_a", r.template_a},
                    {"name_a", r.name_a},
                    {"template_b", r.template_b},
                    {"name_b", r.name_b},
                    {"prob_a_beats_b", r.prob_a_beats_b},
                    {"trials", r.trials}});
  }
  return {{"matrix", std::move(rows)}};
}

nlohmann::json progress_json(const TournamentState& state) {
  const JudgeSummary summary = judge_summary(state);
  nlohmann::json judges = nlohmann::json::array();
  for (const auto& row : summary.judges) {
    judges.push_back({{"judge_id", row.judge_id},
                      {"display_name", row.display_name},
                      {"decisions_made", row.decisions},
                      {"skips_made", row.skips},
                      {"target_decisions", row.target_decisions}});
  }
  const auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"judges", std::move(judges)},
          {"decision_seq", state.decision_seq},
          {"preference_decisions", state.decision_seq - state.skips},
          {"skips", state.skips},
          {"pending", state.pending.size()},
          {"decisions_per_judge", {{"count", summary.decisions.count},
                                   {"mean", opt(summary.decisions.mean)},
                                   {"sd", opt(summary.decisions.sd)}}}};
}

}  // namespace gauntlet::report
