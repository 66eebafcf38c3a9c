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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/generation.hpp"
#include "gauntlet/interaction.hpp"
#include "gauntlet/rating.hpp"
#include "gauntlet/template.hpp"

namespace gauntlet {

struct SchedulerPolicy {
  double epsilon = 0.2;      // probability of an exploration pick
  int coverage_floor = 0;    // trials per pair required before exploiting
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool operator==(const SchedulerPolicy&) const = default;
};

struct JudgeConfig {
  std::string judge_id;
  std::string display_name;
  bool operator==(const JudgeConfig&) const = default;
};

struct TournamentConfig {
  std::string name;
  rating::RatingConfig rating;
  SchedulerPolicy policy;
  std::vector<JudgeConfig> judges;
  int target_decisions = 30;
  templates::SlotRegistry slots = templates::SlotRegistry::canonical();

  void validate() const;
  bool operator==(const TournamentConfig&) const = default;
};

// Unordered template pair, stored with first < second.
struct TemplatePair {
  std::string first;
  std::string second;

  static TemplatePair of(const std::string& a, const std::string& b);
  bool contains(const std::string& id) const { return id == first || id == second; }
  auto operator<=>(const TemplatePair&) const = default;
};

using PairInteraction = std::pair<TemplatePair, std::string>;

enum class Choice { kLeft, kRight, kSkip };

std::string_view to_string(Choice choice);
std::optional<Choice> parse_choice(std::string_view text);

// How the scheduler arrived at a pair.
enum class MatchupMode { kExploit, kExploitFallback, kExplore, kCoverage };

std::string_view to_string(MatchupMode mode);
std::optional<MatchupMode> parse_matchup_mode(std::string_view text);

struct Matchup {
  std::string matchup_id;
  std::string interaction_id;
  std::string candidate_left;
  std::string candidate_right;
  std::string template_left;
  std::string template_right;
  std::string issued_to;
  std::string issued_at;
  MatchupMode mode = MatchupMode::kExploit;

  TemplatePair pair() const { return TemplatePair::of(template_left, template_right); }
  bool operator==(const Matchup&) const = default;
};

struct Decision {
  std::string judge_id;
  std::string matchup_id;
  Choice choice = Choice::kSkip;
  std::string ts;
  bool operator==(const Decision&) const = default;
};

struct RegisteredTemplate {
  templates::PromptTemplate tmpl;
  std::string source;
};

struct JudgeTally {
  std::int64_t decisions = 0;  // left/right only
  std::int64_t skips = 0;
  bool operator==(const JudgeTally&) const = default;
};

// Everything a tournament knows, rebuilt by folding its event log.
struct TournamentState {
  bool created = false;
  std::string tournament_id;
  TournamentConfig config;

  std::map<std::string, RegisteredTemplate, std::less<>> templates;
  std::map<std::string, InteractionRecord, std::less<>> interactions;
  std::vector<std::string> interaction_order;
  std::map<std::string, Candidate, std::less<>> candidates;
  std::map<std::pair<std::string, std::string>, std::string> candidate_index;
  std::vector<generation::GenerationFailure> generation_failures;

  std::map<std::string, rating::RatingState, std::less<>> ratings;
  std::map<std::string, std::int64_t, std::less<>> games;
  std::map<TemplatePair, std::int64_t> pair_trials;
  std::map<PairInteraction, std::int64_t> pair_interaction_usage;
  std::int64_t skips = 0;
  std::map<std::string, Matchup, std::less<>> pending;
  std::map<std::string, std::string, std::less<>> resolved;  // matchup -> judge
  std::int64_t decision_seq = 0;
  std::int64_t matchups_issued = 0;
  std::map<std::string, std::set<PairInteraction>, std::less<>> judge_history;
  std::map<std::string, JudgeTally, std::less<>> judge_tallies;

  std::int64_t last_seq = 0;

  bool has_judge(std::string_view judge_id) const;
  const Candidate* candidate_for(const std::string& template_id,
                                 const std::string& interaction_id) const;
  // Templates with at least one generated candidate, sorted by id.
  std::vector<std::string> competing_templates() const;
  // Pending matchup held by this judge, if any (oldest first).
  const Matchup* pending_for(std::string_view judge_id) const;
};

}  // namespace gauntlet
