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

#include <cstring>
#include <set>

#include <doctest.h>

#include "support/expect.hpp"
#include "support/fixtures.hpp"

namespace gauntlet::scheduler {
namespace {

using testing::error_code;
using testing::fixture_template_id;
using testing::make_tournament;

const std::string kA = fixture_template_id(0);
const std::string kB = fixture_template_id(1);
const std::string kC = fixture_template_id(2);

SchedulerPolicy exploit_only(std::uint64_t seed = 1) {
  SchedulerPolicy p;
  p.epsilon = 0.0;
  p.rng_seed = seed;
  return p;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST_CASE("top two ratings are exploited") {
  auto t = make_tournament(3, 10, 1, exploit_only());
  TournamentState s = t->snapshot();
  s.ratings[kA].rating = 1600;
  s.ratings[kB].rating = 1550;
  s.ratings[kC].rating = 1500;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matchup m = next_matchup(s, "judge1", exploit_only(seed), "ts");
    CHECK(m.pair() == TemplatePair::of(kA, kB));
    CHECK(m.mode == MatchupMode::kExploit);
  }
}

TEST_CASE("exploitation ties break by higher rd then id") {
  auto t = make_tournament(3, 4, 1, exploit_only());
  TournamentState s = t->snapshot();
  s.ratings[kA] = {1500, 100, 0.06};
  s.ratings[kB] = {1500, 300, 0.06};
  s.ratings[kC] = {1500, 300, 0.06};
  CHECK(exploitation_order(s) == std::vector<std::string>{kB, kC, kA});
  CHECK(next_matchup(s, "judge1", exploit_only(), "ts").pair() == TemplatePair::of(kB, kC));
}

TEST_CASE("a single template cannot be scheduled") {
  auto t = make_tournament(1, 5);
  CHECK(error_code([&] { t->next_matchup("judge1"); }) == ErrorCode::kInsufficientTemplates);
  auto none = make_tournament(0, 5);
  CHECK(error_code([&] { none->next_matchup("judge1"); }) == ErrorCode::kInsufficientTemplates);
}

TEST_CASE("coverage floor of one covers all fifteen pairs first") {
  SchedulerPolicy p;
  p.coverage_floor = 1;
  p.rng_seed = 2024;
  auto t = make_tournament(6, 20, 3, p);
  std::set<TemplatePair> pairs;
  for (int i = 0; i < 15; ++i) {
    const std::string judge = "judge" + std::to_string(1 + i % 3);
    const Matchup m = t->next_matchup(judge);
    CHECK(m.mode == MatchupMode::kCoverage);
    CHECK(pairs.insert(m.pair()).second);
    t->submit_decision(judge, m.matchup_id, i % 2 ? Choice::kLeft : Choice::kRight);
  }
  CHECK(pairs.size() == 15);
  const Matchup after = t->next_matchup("judge1");
  CHECK(after.mode != MatchupMode::kCoverage);
}

TEST_CASE("pending matchups count toward coverage") {
  SchedulerPolicy p;
  p.coverage_floor = 1;
  auto t = make_tournament(3, 5, 3, p);
  std::set<TemplatePair> pairs;
  for (int j = 1; j <= 3; ++j) pairs.insert(t->next_matchup("judge" + std::to_string(j)).pair());
  CHECK(pairs.size() == 3);
}

TEST_CASE("a judge keeps their pending matchup until deciding") {
  auto t = make_tournament(4, 5, 2);
  const Matchup first = t->next_matchup("judge1");
  CHECK(t->next_matchup("judge1") == first);
  const Matchup other = t->next_matchup("judge2");
  CHECK(other.matchup_id != first.matchup_id);
  CHECK(error_code([&] { t->next_matchup("stranger"); }) == ErrorCode::kUnknownJudge);
}

TEST_CASE("first decision between fresh templates") {
  auto t = make_tournament(2, 3, 1);
  const Matchup m = t->next_matchup("judge1");
  t->submit_decision("judge1", m.matchup_id, Choice::kLeft);
  const TournamentState s = t->snapshot();
  const auto& w = s.ratings.at(m.template_left);
  const auto& l = s.ratings.at(m.template_right);
  CHECK(w.rating == doctest::Approx(1662.3108939063003).epsilon(1e-10));
  CHECK(l.rating == doctest::Approx(1337.6891060936997).epsilon(1e-10));
  CHECK(w.rating - 1500 == doctest::Approx(1500 - l.rating).epsilon(1e-12));
  CHECK(w.rd == doctest::Approx(290.31896371798264).epsilon(1e-10));
  CHECK(s.pair_trials.at(m.pair()) == 1);
  CHECK(s.games.at(m.template_left) == 1);
  CHECK(s.decision_seq == 1);
  CHECK(s.judge_tallies.at("judge1").decisions == 1);
}

TEST_CASE("skip leaves ratings bitwise unchanged") {
  auto t = make_tournament(3, 4, 1);
  Matchup m = t->next_matchup("judge1");
  t->submit_decision("judge1", m.matchup_id, Choice::kRight);
  const TournamentState before = t->snapshot();
  m = t->next_matchup("judge1");
  t->submit_decision("judge1", m.matchup_id, Choice::kSkip);
  const TournamentState after = t->snapshot();
  for (const auto& [id, r] : before.ratings) {
    CHECK(same_bits(r.rating, after.ratings.at(id).rating));
    CHECK(same_bits(r.rd, after.ratings.at(id).rd));
    CHECK(same_bits(r.sigma, after.ratings.at(id).sigma));
  }
  CHECK(after.skips == before.skips + 1);
  CHECK(after.pair_trials == before.pair_trials);
  CHECK(after.judge_tallies.at("judge1").skips == 1);
  CHECK(after.decision_seq == before.decision_seq + 1);
  // The skipped combination is not offered again.
  CHECK(after.judge_history.at("judge1").contains({m.pair(), m.interaction_id}));
}

TEST_CASE("decision errors") {
  auto t = make_tournament(3, 4, 2);
  const Matchup m = t->next_matchup("judge1");
  CHECK(error_code([&] { t->submit_decision("judge2", m.matchup_id, Choice::kLeft); }) ==
        ErrorCode::kMatchupNotPendingForJudge);
  CHECK(error_code([&] { t->submit_decision("judge1", "m999", Choice::kLeft); }) ==
        ErrorCode::kUnknownMatchup);
  t->submit_decision("judge1", m.matchup_id, Choice::kLeft);
  const auto events = t->events().size();
  CHECK(error_code([&] { t->submit_decision("judge1", m.matchup_id, Choice::kLeft); }) ==
        ErrorCode::kDuplicateDecision);
  CHECK(t->events().size() == events);
}

TEST_CASE("replaying a decision fails on the second application") {
  auto t = make_tournament(2, 2, 1);
  const Matchup m = t->next_matchup("judge1");
  t->submit_decision("judge1", m.matchup_id, Choice::kLeft);
  TournamentState s = t->snapshot();
  const TournamentState copy = s;
  const Decision d{"judge1", m.matchup_id, Choice::kLeft, "ts"};
  CHECK(error_code([&] { record_decision(s, d); }) == ErrorCode::kDuplicateDecision);
  CHECK(s.ratings == copy.ratings);
  CHECK(s.decision_seq == copy.decision_seq);
}

TEST_CASE("a judge runs out of eligible matchups") {
  auto t = make_tournament(2, 3, 1);
  for (int i = 0; i < 3; ++i) {
    const Matchup m = t->next_matchup("judge1");
    t->submit_decision("judge1", m.matchup_id, Choice::kLeft);
  }
  CHECK(error_code([&] { t->next_matchup("judge1"); }) == ErrorCode::kNoEligibleMatchup);
}

TEST_CASE("no judge sees the same pair and interaction twice") {
  SchedulerPolicy p;
  p.epsilon = 0.5;
  p.rng_seed = 77;
  auto t = make_tournament(4, 6, 2, p);
  std::map<std::string, std::set<PairInteraction>> seen;
  for (int i = 0; i < 60; ++i) {
    const std::string judge = "judge" + std::to_string(1 + i % 2);
    Matchup m;
    try {
      m = t->next_matchup(judge);
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::kNoEligibleMatchup);
      continue;
    }
    CHECK(seen[judge].insert({m.pair(), m.interaction_id}).second);
    CHECK(m.template_left != m.template_right);
    t->submit_decision(judge, m.matchup_id, i % 3 ? Choice::kLeft : Choice::kSkip);
  }
  CHECK(seen["judge1"].size() == 30);
  CHECK(seen["judge2"].size() == 30);
}

TEST_CASE("interactions are spread across a pair") {
  auto t = make_tournament(2, 5, 5, exploit_only(3));
  std::map<std::string, int> used;
  for (int j = 1; j <= 5; ++j) {
    const std::string judge = "judge" + std::to_string(j);
    const Matchup m = t->next_matchup(judge);
    ++used[m.interaction_id];
    t->submit_decision(judge, m.matchup_id, Choice::kLeft);
  }
  CHECK(used.size() == 5);
}

TEST_CASE("scheduling is deterministic for a seed") {
  const auto run = [](std::uint64_t seed) {
    SchedulerPolicy p;
    p.rng_seed = seed;
    p.epsilon = 0.3;
    auto t = make_tournament(5, 8, 2, p);
    std::vector<Matchup> out;
    for (int i = 0; i < 30; ++i) {
      const std::string judge = "judge" + std::to_string(1 + i % 2);
      const Matchup m = t->next_matchup(judge);
      out.push_back(m);
      t->submit_decision(judge, m.matchup_id, i % 2 ? Choice::kLeft : Choice::kRight);
    }
    return out;
  };
  CHECK(run(5) == run(5));
  CHECK_FALSE(run(5) == run(6));
}

TEST_CASE("left and right sides are balanced") {
  auto t = make_tournament(2, 1, 1, exploit_only());
  TournamentState s = t->snapshot();
  int first_left = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Matchup m = next_matchup(s, "judge1", exploit_only(seed), "ts");
    first_left += m.template_left == kA;
  }
  CHECK(first_left > 900);
  CHECK(first_left < 1100);
}

TEST_CASE("exploration follows combined uncertainty") {
  auto t = make_tournament(3, 2, 1);
  TournamentState s = t->snapshot();
  s.ratings[kA].rd = 350;
  s.ratings[kB].rd = 350;
  s.ratings[kC].rd = 1e-3;
  SchedulerPolicy p;
  p.epsilon = 1.0;
  std::map<TemplatePair, int> counts;
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    p.rng_seed = seed;
    const Matchup m = next_matchup(s, "judge1", p, "ts");
    CHECK(m.mode == MatchupMode::kExplore);
    ++counts[m.pair()];
  }
  // Weights sqrt(2)*350 : 350 : 350.
  const double expected_ab = 3000 * std::sqrt(2.0) / (std::sqrt(2.0) + 2.0);
  CHECK(std::abs(counts[TemplatePair::of(kA, kB)] - expected_ab) < 120);
}

TEST_CASE("exploit falls back when the top pair is exhausted") {
  auto t = make_tournament(3, 1, 1, exploit_only());
  TournamentState s = t->snapshot();
  s.ratings[kA].rating = 1600;
  s.ratings[kB].rating = 1550;
  s.judge_history["judge1"].insert({TemplatePair::of(kA, kB), "int1000"});
  const Matchup m = next_matchup(s, "judge1", exploit_only(), "ts");
  CHECK(m.mode == MatchupMode::kExploitFallback);
  CHECK(m.pair() == TemplatePair::of(kA, kC));
}

TEST_CASE("rd never exceeds the base deviation") {
  TournamentConfig c = testing::fixture_config(2);
  c.rating.inflate_inactive = true;
  auto t = make_tournament(4, 6, c);
  for (int i = 0; i < 20; ++i) {
    const std::string judge = "judge" + std::to_string(1 + i % 2);
    const Matchup m = t->next_matchup(judge);
    t->submit_decision(judge, m.matchup_id, Choice::kLeft);
    for (const auto& [id, r] : t->snapshot().ratings) {
      CHECK(r.rd <= c.rating.base_rd);
      CHECK(r.rd > 0);
    }
  }
}

TEST_CASE("standings order") {
  auto t = make_tournament(3, 2, 1, exploit_only());
  auto fresh = standings(t->snapshot());
  REQUIRE(fresh.size() == 3);
  CHECK(fresh[0].template_id == kA);
  CHECK(fresh[1].template_id == kB);
  CHECK(fresh[2].template_id == kC);
  for (const auto& s : fresh) CHECK(s.state == rating::RatingState{1500, 350, 0.06});

  const Matchup m = t->next_matchup("judge1");
  const std::string winner = m.template_left;
  t->submit_decision("judge1", m.matchup_id, Choice::kLeft);
  CHECK(standings(t->snapshot()).front().template_id == winner);
  CHECK(standings(t->snapshot()).front().games == 1);
}

TEST_CASE("policy validation") {
  SchedulerPolicy p;
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p.epsilon = 0.1;
  p.coverage_floor = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

}  // namespace
}  // namespace gauntlet::scheduler
