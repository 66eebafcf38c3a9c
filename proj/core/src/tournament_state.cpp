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

#include "gauntlet/tournament_state.hpp"

#include <cmath>
#include <set>

#include "gauntlet/error.hpp"

namespace gauntlet {

void SchedulerPolicy::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kConfig, "scheduler epsilon must be in [0, 1]");
  }
  if (coverage_floor < 0) {
    throw Error(ErrorCode::kConfig, "scheduler coverage_floor must be >= 0");
  }
}

void TournamentConfig::validate() const {
  rating.validate();
  policy.validate();
  if (target_decisions < 1) {
    throw Error(ErrorCode::kConfig, "target_decisions must be >= 1");
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& judge : judges) {
    if (judge.judge_id.empty()) throw Error(ErrorCode::kConfig, "judge_id must be non-empty");
    if (!ids.insert(judge.judge_id).second) {
      throw Error(ErrorCode::kConfig, "duplicate judge_id '" + judge.judge_id + "'");
    }
  }
}

TemplatePair TemplatePair::of(const std::string& a, const std::string& b) {
  return a < b ? TemplatePair{a, b} : TemplatePair{b, a};
}

std::string_view to_string(Choice choice) {
  switch (choice) {
    case Choice::kLeft: return "left";
    case Choice::kRight: return "right";
    case Choice::kSkip: return "skip";
  }
  return "skip";
}

std::optional<Choice> parse_choice(std::string_view text) {
  if (text == "left") return Choice::kLeft;
  if (text == "right") return Choice::kRight;
  if (text == "skip") return Choice::kSkip;
  return std::nullopt;
}

std::string_view to_string(MatchupMode mode) {
  switch (mode) {
    case MatchupMode::kExploit: return "exploit";
    case MatchupMode::kExploitFallback: return "exploit_fallback";
    case MatchupMode::kExplore: return "explore";
    case MatchupMode::kCoverage: return "coverage";
  }
  return "exploit";
}

std::optional<MatchupMode> parse_matchup_mode(std::string_view text) {
  for (auto mode : {MatchupMode::kExploit, MatchupMode::kExploitFallback,
                    MatchupMode::kExplore, MatchupMode::kCoverage}) {
    if (to_string(mode) == text) return mode;
  }
  return std::nullopt;
}

bool TournamentState::has_judge(std::string_view judge_id) const {
  for (const auto& judge : config.judges) {
    if (judge.judge_id == judge_id) return true;
  }
  return false;
}

const Candidate* TournamentState::candidate_for(const std::string& template_id,
                                                const std::string& interaction_id) const {
  const auto it = candidate_index.find({template_id, interaction_id});
  if (it == candidate_index.end()) return nullptr;
  return &candidates.find(it->second)->second;
}

std::vector<std::string> TournamentState::competing_templates() const {
  std::vector<std::string> out;
  for (const auto& [id, entry] : templates) {
    const auto it = candidate_index.lower_bound({id, std::string()});
    if (it != candidate_index.end() && it->first.first == id) out.push_back(id);
  }
  return out;
}

const Matchup* TournamentState::pending_for(std::string_view judge_id) const {
  const Matchup* best = nullptr;
  for (const auto& [id, matchup] : pending) {
    if (matchup.issued_to != judge_id) continue;
    // Ids are "m<n>": shorter ids were issued earlier.
    const auto key = [](const Matchup& m) {
      return std::pair(m.matchup_id.size(), std::string_view(m.matchup_id));
    };
    if (!best || key(matchup) < key(*best)) {
      best = &matchup;
    }
  }
  return best;
}

}  // namespace gauntlet
