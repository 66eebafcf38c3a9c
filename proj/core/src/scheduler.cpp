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

#include "gauntlet/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string_view>

#include "gauntlet/error.hpp"
#include "gauntlet/rng.hpp"

namespace gauntlet::scheduler {
namespace {

struct ViablePair {
  TemplatePair pair;
  std::vector<std::string> interactions;
};

// Pairs this judge can still be shown, each with its eligible interactions.
std::vector<ViablePair> viable_pairs(const TournamentState& state,
                                     const std::vector<std::string>& competing,
                                     const std::string& judge_id) {
  const std::size_t n_templates = competing.size();
  const std::size_t n_interactions = state.interaction_order.size();
  std::map<std::string_view, std::size_t> template_index, interaction_index;
  for (std::size_t t = 0; t < n_templates; ++t) template_index[competing[t]] = t;
  for (std::size_t k = 0; k < n_interactions; ++k) {
    interaction_index[state.interaction_order[k]] = k;
  }

  // available[t][k]: template t has a candidate for interaction k.
  std::vector<std::vector<char>> available(n_templates, std::vector<char>(n_interactions, 0));
  for (const auto& [key, candidate_id] : state.candidate_index) {
    const auto t = template_index.find(key.first);
    const auto k = interaction_index.find(key.second);
    if (t != template_index.end() && k != interaction_index.end()) {
      available[t->second][k->second] = 1;
    }
  }

  // blocked[(i * n + j) * n_interactions + k]: seen by or pending for this judge.
  std::vector<char> blocked(n_templates * n_templates * n_interactions, 0);
  const auto block = [&](const TemplatePair& pair, const std::string& iid) {
    const auto i = template_index.find(pair.first);
    const auto j = template_index.find(pair.second);
    const auto k = interaction_index.find(iid);
    if (i == template_index.end() || j == template_index.end() ||
        k == interaction_index.end()) {
      return;
    }
    blocked[(i->second * n_templates + j->second) * n_interactions + k->second] = 1;
  };
  if (const auto hist = state.judge_history.find(judge_id); hist != state.judge_history.end()) {
    for (const auto& [pair, iid] : hist->second) block(pair, iid);
  }
  for (const auto& [id, m] : state.pending) {
    if (m.issued_to == judge_id) block(m.pair(), m.interaction_id);
  }

  std::vector<ViablePair> out;
  for (std::size_t i = 0; i < n_templates; ++i) {
    for (std::size_t j = i + 1; j < n_templates; ++j) {
      ViablePair vp{TemplatePair::of(competing[i], competing[j]), {}};
      const std::size_t base = (i * n_templates + j) * n_interactions;
      for (std::size_t k = 0; k < n_interactions; ++k) {
        if (available[i][k] && available[j][k] && !blocked[base + k]) {
          vp.interactions.push_back(state.interaction_order[k]);
        }
      }
      if (!vp.interactions.empty()) out.push_back(std::move(vp));
    }
  }
  return out;
}

const rating::RatingState& rating_of(const TournamentState& state, const std::string& id) {
  const auto it = state.ratings.find(id);
  if (it == state.ratings.end()) {
    throw Error(ErrorCode::kInvariantViolation, "template '" + id + "' has no rating");
  }
  return it->second;
}

template <typename T>
T& find_or_throw(std::map<std::string, T, std::less<>>& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) {
    throw Error(ErrorCode::kInvariantViolation, "unknown template '" + key + "'");
  }
  return it->second;
}

rating::RatingState clamp_rd(rating::RatingState s, const rating::RatingConfig& config) {
  s.rd = std::min(s.rd, config.base_rd);
  return s;
}

}  // namespace

std::vector<Standing> standings(const TournamentState& state) {
  std::vector<Standing> out;
  out.reserve(state.templates.size());
  for (const auto& [id, entry] : state.templates) {
    const auto games = state.games.find(id);
    out.push_back({id, entry.tmpl.name, rating_of(state, id),
                   games == state.games.end() ? 0 : games->second});
  }
  std::stable_sort(out.begin(), out.end(), [](const Standing& a, const Standing& b) {
    if (a.state.rating != b.state.rating) return a.state.rating > b.state.rating;
    return a.template_id < b.template_id;
  });
  return out;
}

std::vector<std::string> exploitation_order(const TournamentState& state) {
  std::vector<std::string> order = state.competing_templates();
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const auto& ra = rating_of(state, a);
    const auto& rb = rating_of(state, b);
    if (ra.rating != rb.rating) return ra.rating > rb.rating;
    if (ra.rd != rb.rd) return ra.rd > rb.rd;
    return a < b;
  });
  return order;
}

Matchup next_matchup(const TournamentState& state, const std::string& judge_id,
                     const SchedulerPolicy& policy, const std::string& issued_at) {
  policy.validate();
  const std::vector<std::string> competing = state.competing_templates();
  if (competing.size() < 2) {
    throw Error(ErrorCode::kInsufficientTemplates,
                "need at least two templates with generated candidates, have " +
                    std::to_string(competing.size()));
  }
  const std::vector<ViablePair> viable = viable_pairs(state, competing, judge_id);
  if (viable.empty()) {
    throw Error(ErrorCode::kNoEligibleMatchup,
                "judge '" + judge_id + "' has no eligible matchup left");
  }

  Rng rng(mix_seed(policy.rng_seed, static_cast<std::uint64_t>(state.matchups_issued)));
  const double explore_draw = rng.uniform();

  const ViablePair* chosen = nullptr;
  MatchupMode mode = MatchupMode::kExploit;

  if (policy.coverage_floor > 0) {
    std::map<TemplatePair, std::int64_t> coverage = state.pair_trials;
    for (const auto& [id, m] : state.pending) ++coverage[m.pair()];
    std::int64_t best = policy.coverage_floor;
    for (const auto& vp : viable) {
      const auto it = coverage.find(vp.pair);
      const std::int64_t c = it == coverage.end() ? 0 : it->second;
      if (c < best) {
        best = c;
        chosen = &vp;
      }
    }
    if (chosen) mode = MatchupMode::kCoverage;
  }

  if (!chosen && explore_draw < policy.epsilon) {
    std::vector<double> weights;
    weights.reserve(viable.size());
    double total = 0.0;
    for (const auto& vp : viable) {
      const double rd_a = rating_of(state, vp.pair.first).rd;
      const double rd_b = rating_of(state, vp.pair.second).rd;
      weights.push_back(std::sqrt(rd_a * rd_a + rd_b * rd_b));
      total += weights.back();
    }
    double target = rng.uniform() * total;
    chosen = &viable.back();
    for (std::size_t i = 0; i < viable.size(); ++i) {
      if (target < weights[i]) {
        chosen = &viable[i];
        break;
      }
      target -= weights[i];
    }
    mode = MatchupMode::kExplore;
  }

  if (!chosen) {
    const std::vector<std::string> order = exploitation_order(state);
    const auto find_viable = [&](const TemplatePair& pair) -> const ViablePair* {
      for (const auto& vp : viable) {
        if (vp.pair == pair) return &vp;
      }
      return nullptr;
    };
    chosen = find_viable(TemplatePair::of(order[0], order[1]));
    mode = MatchupMode::kExploit;
    for (std::size_t i = 0; !chosen && i < order.size(); ++i) {
      for (std::size_t j = i + 1; !chosen && j < order.size(); ++j) {
        chosen = find_viable(TemplatePair::of(order[i], order[j]));
      }
    }
    if (mode == MatchupMode::kExploit && !(chosen->pair == TemplatePair::of(order[0], order[1]))) {
      mode = MatchupMode::kExploitFallback;
    }
  }

  std::vector<std::string> least_used;
  std::int64_t min_usage = -1;
  for (const auto& iid : chosen->interactions) {
    const auto it = state.pair_interaction_usage.find({chosen->pair, iid});
    const std::int64_t usage = it == state.pair_interaction_usage.end() ? 0 : it->second;
    if (min_usage < 0 || usage < min_usage) {
      min_usage = usage;
      least_used.clear();
    }
    if (usage == min_usage) least_used.push_back(iid);
  }
  const std::string& interaction_id = least_used[rng.below(least_used.size())];

  const bool first_on_left = rng.coin();
  const std::string& left = first_on_left ? chosen->pair.first : chosen->pair.second;
  const std::string& right = first_on_left ? chosen->pair.second : chosen->pair.first;

  Matchup m;
  m.matchup_id = "m" + std::to_string(state.matchups_issued + 1);
  m.interaction_id = interaction_id;
  m.template_left = left;
  m.template_right = right;
  m.candidate_left = state.candidate_for(left, interaction_id)->candidate_id;
  m.candidate_right = state.candidate_for(right, interaction_id)->candidate_id;
  m.issued_to = judge_id;
  m.issued_at = issued_at;
  m.mode = mode;
  return m;
}

void issue(TournamentState& state, const Matchup& m) {
  if (m.template_left == m.template_right) {
    throw Error(ErrorCode::kInvariantViolation, "matchup " + m.matchup_id + " is a self-pair");
  }
  if (state.pending.contains(m.matchup_id) || state.resolved.contains(m.matchup_id)) {
    throw Error(ErrorCode::kInvariantViolation,
                "matchup id " + m.matchup_id + " already issued");
  }
  const Candidate* left = state.candidate_for(m.template_left, m.interaction_id);
  const Candidate* right = state.candidate_for(m.template_right, m.interaction_id);
  if (!left || !right || left->candidate_id != m.candidate_left ||
      right->candidate_id != m.candidate_right) {
    throw Error(ErrorCode::kInvariantViolation,
                "matchup " + m.matchup_id + " references unknown candidates");
  }
  const PairInteraction key{m.pair(), m.interaction_id};
  if (const auto hist = state.judge_history.find(m.issued_to);
      hist != state.judge_history.end() && hist->second.contains(key)) {
    throw Error(ErrorCode::kInvariantViolation,
                "matchup " + m.matchup_id + " repeats a combination judge '" + m.issued_to +
                    "' has already seen");
  }
  state.pending.emplace(m.matchup_id, m);
  ++state.pair_interaction_usage[key];
  ++state.matchups_issued;
}

void record_decision(TournamentState& state, const Decision& d) {
  const auto it = state.pending.find(d.matchup_id);
  if (it == state.pending.end()) {
    if (state.resolved.contains(d.matchup_id)) {
      throw Error(ErrorCode::kDuplicateDecision,
                  "matchup " + d.matchup_id + " already has a decision");
    }
    throw Error(ErrorCode::kUnknownMatchup, "unknown matchup " + d.matchup_id);
  }
  const Matchup& m = it->second;
  if (m.issued_to != d.judge_id) {
    throw Error(ErrorCode::kMatchupNotPendingForJudge,
                "matchup " + d.matchup_id + " is not pending for judge '" + d.judge_id + "'");
  }
  const rating::RatingConfig& rc = state.config.rating;

  std::map<std::string, rating::RatingState, std::less<>> new_ratings;
  if (d.choice != Choice::kSkip) {
    const std::string& winner = d.choice == Choice::kLeft ? m.template_left : m.template_right;
    const std::string& loser = d.choice == Choice::kLeft ? m.template_right : m.template_left;
    const rating::RatingState winner_before = find_or_throw(state.ratings, winner);
    const rating::RatingState loser_before = find_or_throw(state.ratings, loser);
    const std::array<rating::GameResult, 1> won{{{loser_before, rating::Outcome::kWin}}};
    const std::array<rating::GameResult, 1> lost{{{winner_before, rating::Outcome::kLoss}}};
    new_ratings[winner] = clamp_rd(rating::update(winner_before, won, rc), rc);
    new_ratings[loser] = clamp_rd(rating::update(loser_before, lost, rc), rc);
    if (rc.inflate_inactive) {
      for (const auto& [id, r] : state.ratings) {
        if (id != winner && id != loser) {
          new_ratings[id] = clamp_rd(rating::inactivity_step(r, rc), rc);
        }
      }
    }
  }

  // Nothing below throws.
  const TemplatePair pair = m.pair();
  const PairInteraction key{pair, m.interaction_id};
  for (auto& [id, r] : new_ratings) state.ratings[id] = r;
  JudgeTally& tally = state.judge_tallies[d.judge_id];
  if (d.choice == Choice::kSkip) {
    ++state.skips;
    ++tally.skips;
  } else {
    ++state.pair_trials[pair];
    ++state.games[pair.first];
    ++state.games[pair.second];
    ++tally.decisions;
  }
  state.judge_history[d.judge_id].insert(key);
  state.resolved.emplace(d.matchup_id, d.judge_id);
  state.pending.erase(it);
  ++state.decision_seq;
}

}  // namespace gauntlet::scheduler
