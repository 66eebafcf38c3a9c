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

// Adaptive top-two matchup selection and decision application.
//
// Selection order for a judge:
//   1. If coverage_floor > 0 and some viable pair has fewer than
//      coverage_floor trials (pending matchups count), take the least-covered
//      pair, lexicographically first on ties.
//   2. Otherwise, with probability epsilon, sample a viable pair with weight
//      sqrt(rd_a^2 + rd_b^2).
//   3. Otherwise take the two highest-rated templates (ties: higher rd, then
//      template id). If this judge has exhausted that pair, fall back to the
//      next pair in rank order.
// The interaction is drawn uniformly among the least-used interactions for
// the pair, and the left/right positions come from a fair coin. All
// randomness is derived from (rng_seed, matchups_issued), so replaying a log
// and asking again yields the same matchup.

#include <string>
#include <vector>

#include "gauntlet/rating.hpp"
#include "gauntlet/tournament_state.hpp"

namespace gauntlet::scheduler {

struct Standing {
  std::string template_id;
  std::string name;
  rating::RatingState state;
  std::int64_t games = 0;
  bool operator==(const Standing&) const = default;
};

// Descending by rating, ties by template id. Includes every registered template.
std::vector<Standing> standings(const TournamentState& state);

// Competing templates ordered for exploitation: rating desc, rd desc, id asc.
std::vector<std::string> exploitation_order(const TournamentState& state);

// Pure: does not modify `state`. Throws kInsufficientTemplates when fewer than
// two templates have candidates and kNoEligibleMatchup when the judge has
// seen every (pair, interaction) combination.
Matchup next_matchup(const TournamentState& state, const std::string& judge_id,
                     const SchedulerPolicy& policy, const std::string& issued_at);

// Makes `matchup` pending. Strong exception guarantee.
void issue(TournamentState& state, const Matchup& matchup);

// Applies a judge's choice. A win/loss updates both templates from their
// pre-decision snapshots; a skip only bumps the skip counter. Strong
// exception guarantee.
void record_decision(TournamentState& state, const Decision& decision);

}  // namespace gauntlet::scheduler
