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

#include "gauntlet/replay.hpp"

#include <doctest.h>

#include "gauntlet/codec.hpp"
#include "gauntlet/report.hpp"
#include "gauntlet/scheduler.hpp"
#include "gauntlet/simulator.hpp"
#include "support/expect.hpp"
#include "support/fixtures.hpp"

namespace gauntlet {
namespace {

using testing::error_code;
using testing::state_digest;

std::vector<Event> sample_log(std::uint64_t seed, int decisions) {
  SchedulerPolicy p;
  p.rng_seed = seed;
  p.epsilon = 0.25;
  auto t = testing::make_tournament(4, 6, 3, p);
  testing::play(*t, decisions, seed);
  return t->events();
}

TEST_CASE("empty log gives the initial state") {
  const TournamentState s = replay({});
  CHECK_FALSE(s.created);
  CHECK(s.templates.empty());
  CHECK(s.ratings.empty());
  CHECK(s.last_seq == 0);
}

TEST_CASE("replay matches the live state") {
  SchedulerPolicy p;
  p.rng_seed = 4;
  auto t = testing::make_tournament(5, 7, 2, p);
  testing::play(*t, 25);
  CHECK(state_digest(replay(t->events())) == state_digest(t->snapshot()));
}

TEST_CASE("fold law holds for every prefix") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const std::vector<Event> events = sample_log(seed, 20);
    TournamentState folded;
    for (std::size_t k = 0; k < events.size(); ++k) {
      apply_event(folded, events[k]);
      if (k % 7 == 0 || k + 1 == events.size()) {
        const std::span<const Event> prefix(events.data(), k + 1);
        CHECK(state_digest(replay(prefix)) == state_digest(folded));
      }
    }
  }
}

TEST_CASE("rejected events leave the state untouched") {
  const std::vector<Event> events = sample_log(9, 6);
  TournamentState s = replay(events);
  const std::string before = state_digest(s);
  const std::int64_t next = s.last_seq + 1;

  const auto expect_rejected = [&](const Event& e, ErrorCode code) {
    CHECK(error_code([&] { apply_event(s, e); }) == code);
    CHECK(state_digest(s) == before);
  };

  Event gap{next + 1, "ts", EventType::kTournamentCreated,
            payload::tournament_created("x", "y")};
  expect_rejected(gap, ErrorCode::kSequenceGap);

  Event again{next, "ts", EventType::kTournamentCreated, payload::tournament_created("x", "y")};
  expect_rejected(again, ErrorCode::kInvariantViolation);

  const Event* decision = nullptr;
  for (const auto& e : events) {
    if (e.type == EventType::kDecisionRecorded) decision = &e;
  }
  REQUIRE(decision);
  Event duplicate = *decision;
  duplicate.seq = next;
  expect_rejected(duplicate, ErrorCode::kDuplicateDecision);

  Event dup_template{next, "ts", EventType::kTemplateRegistered,
                     payload::template_registered(
                         testing::fixture_template_id(0),
                         testing::fixture_template_source(testing::fixture_template_id(0)))};
  expect_rejected(dup_template, ErrorCode::kDuplicateTemplate);

  Event dup_interaction{next, "ts", EventType::kInteractionIngested,
                        payload::interaction_ingested(testing::fixture_interaction(0))};
  expect_rejected(dup_interaction, ErrorCode::kDuplicateInteraction);

  Matchup m = scheduler::next_matchup(s, "judge1", s.config.policy, "ts");
  m.issued_to = "nobody";
  expect_rejected({next, "ts", EventType::kMatchupIssued, payload::matchup_issued(m)},
                  ErrorCode::kUnknownJudge);

  TournamentConfig changed = s.config;
  changed.rating.tau = 0.3;
  expect_rejected({next, "ts", EventType::kConfigSet, payload::config_set(changed)},
                  ErrorCode::kInvariantViolation);

  expect_rejected({next, "ts", EventType::kDecisionRecorded, {{"judge_id", 3}}},
                  ErrorCode::kLogCorrupt);
}

TEST_CASE("events before creation are rejected") {
  TournamentState s;
  const Event e{1, "ts", EventType::kInteractionIngested,
                payload::interaction_ingested(testing::fixture_interaction(0))};
  CHECK(error_code([&] { apply_event(s, e); }) == ErrorCode::kInvariantViolation);
}

TEST_CASE("simulator fixture log replays to identical standings") {
  sim::SimulationConfig config;
  config.judge.true_strengths = {8, 4, 2, 1, 1, 1};
  config.judge.lapse_rate = 0.1;
  config.judge.seed = 42;
  config.replications = 1;
  std::vector<Event> events;
  const auto result = sim::run_replication(config, 0, &events);
  CHECK(result.decisions == 213);
  const TournamentState a = replay(events);
  const TournamentState b = replay(events);
  CHECK(state_digest(a) == state_digest(b));
  CHECK(scheduler::standings(a) == scheduler::standings(b));
  CHECK(report::win_matrix(a) == report::win_matrix(b));
  CHECK(a.decision_seq - a.skips == 213);
}

TEST_CASE("config changes before any decision reset ratings") {
  auto t = testing::make_tournament(2, 2, 1);
  TournamentConfig c = testing::fixture_config(1);
  c.rating.base_rating = 1200;
  CHECK(t->ensure_config("fixture", c));
  for (const auto& [id, r] : t->snapshot().ratings) CHECK(r.rating == 1200);
  CHECK_FALSE(t->ensure_config("fixture", c));
}

}  // namespace
}  // namespace gauntlet
