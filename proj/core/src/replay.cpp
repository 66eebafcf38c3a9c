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

#include <algorithm>

#include "gauntlet/codec.hpp"
#include "gauntlet/error.hpp"
#include "gauntlet/scheduler.hpp"

namespace gauntlet {
namespace {

[[noreturn]] void violation(const Event& e, const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation,
              "seq " + std::to_string(e.seq) + " (" + std::string(to_string(e.type)) +
                  "): " + what);
}

void apply_config(TournamentState& s, const Event& e) {
  TournamentConfig config = tournament_config_from_json(e.payload.at("config"));
  if (s.decision_seq > 0 && !(config.rating == s.config.rating)) {
    violation(e, "rating config cannot change after decisions were recorded");
  }
  if (!s.templates.empty() && !(config.slots == s.config.slots)) {
    violation(e, "slot registry cannot change after templates were registered");
  }
  const bool reset_ratings = s.decision_seq == 0;
  s.config = std::move(config);
  if (reset_ratings) {
    for (auto& [id, r] : s.ratings) r = rating::initial_state(s.config.rating);
  }
}

void apply_template(TournamentState& s, const Event& e) {
  const std::string id = e.payload.at("template_id").get<std::string>();
  std::string source = e.payload.at("source").get<std::string>();
  templates::PromptTemplate tmpl = templates::parse_template(source, s.config.slots);
  if (tmpl.template_id != id) violation(e, "payload template_id does not match the source");
  if (s.templates.contains(id)) {
    throw Error(ErrorCode::kDuplicateTemplate, "template '" + id + "' is already registered");
  }
  s.templates.emplace(id, RegisteredTemplate{std::move(tmpl), std::move(source)});
  s.ratings[id] = rating::initial_state(s.config.rating);
  s.games[id] = 0;
}

void apply_interaction(TournamentState& s, const Event& e) {
  InteractionRecord record = interaction_from_json(e.payload);
  if (s.interactions.contains(record.interaction_id)) {
    throw Error(ErrorCode::kDuplicateInteraction,
                "interaction '" + record.interaction_id + "' is already ingested");
  }
  s.interaction_order.push_back(record.interaction_id);
  const std::string id = record.interaction_id;
  s.interactions.emplace(id, std::move(record));
}

void forget_failure(TournamentState& s, const std::string& tid, const std::string& iid) {
  std::erase_if(s.generation_failures, [&](const generation::GenerationFailure& f) {
    return f.template_id == tid && f.interaction_id == iid;
  });
}

void apply_candidate(TournamentState& s, const Event& e) {
  Candidate c = candidate_from_json(e.payload.at("candidate"));
  if (!s.templates.contains(c.template_id)) violation(e, "unknown template " + c.template_id);
  if (!s.interactions.contains(c.interaction_id)) {
    violation(e, "unknown interaction " + c.interaction_id);
  }
  if (c.text.empty()) violation(e, "candidate text is empty");
  if (s.candidate_index.contains({c.template_id, c.interaction_id})) {
    violation(e, "candidate for (" + c.template_id + ", " + c.interaction_id +
                     ") already exists");
  }
  if (s.candidates.contains(c.candidate_id)) violation(e, "duplicate candidate id");
  forget_failure(s, c.template_id, c.interaction_id);
  s.candidate_index[{c.template_id, c.interaction_id}] = c.candidate_id;
  const std::string id = c.candidate_id;
  s.candidates.emplace(id, std::move(c));
}

void apply_failure(TournamentState& s, const Event& e) {
  generation::GenerationFailure f = generation_failure_from_json(e.payload);
  if (s.candidate_index.contains({f.template_id, f.interaction_id})) {
    violation(e, "failure recorded for a pair that already has a candidate");
  }
  forget_failure(s, f.template_id, f.interaction_id);
  s.generation_failures.push_back(std::move(f));
}

void apply_matchup(TournamentState& s, const Event& e) {
  const Matchup m = matchup_from_json(e.payload);
  if (!s.has_judge(m.issued_to)) {
    throw Error(ErrorCode::kUnknownJudge, "unknown judge '" + m.issued_to + "'");
  }
  scheduler::issue(s, m);
}

}  // namespace

void apply_event(TournamentState& state, const Event& event) {
  if (event.seq != state.last_seq + 1) {
    throw Error(ErrorCode::kSequenceGap, "expected seq " + std::to_string(state.last_seq + 1) +
                                             ", got " + std::to_string(event.seq));
  }
  if (event.type != EventType::kTournamentCreated && !state.created) {
    violation(event, "tournament has not been created");
  }
  try {
    switch (event.type) {
      case EventType::kTournamentCreated:
        if (state.created) violation(event, "tournament already created");
        state.tournament_id = event.payload.at("tournament_id").get<std::string>();
        state.config.name = event.payload.at("name").get<std::string>();
        state.created = true;
        break;
      case EventType::kConfigSet: apply_config(state, event); break;
      case EventType::kTemplateRegistered: apply_template(state, event); break;
      case EventType::kInteractionIngested: apply_interaction(state, event); break;
      case EventType::kCandidateGenerated: apply_candidate(state, event); break;
      case EventType::kGenerationFailed: apply_failure(state, event); break;
      case EventType::kMatchupIssued: apply_matchup(state, event); break;
      case EventType::kDecisionRecorded:
        scheduler::record_decision(state, decision_from_json(event.payload));
        break;
    }
  } catch (const nlohmann::json::exception& ex) {
    violation(event, std::string("malformed payload: ") + ex.what());
  }
  state.last_seq = event.seq;
}

TournamentState replay(std::span<const Event> events) {
  TournamentState state;
  for (const Event& e : events) apply_event(state, e);
  return state;
}

namespace payload {

nlohmann::json tournament_created(const std::string& tournament_id, const std::string& name) {
  return {{"tournament_id", tournament_id}, {"name", name}};
}

nlohmann::json config_set(const TournamentConfig& config) { return {{"config", encode(config)}}; }

nlohmann::json template_registered(const std::string& template_id, const std::string& source) {
  return {{"template_id", template_id}, {"source", source}};
}

nlohmann::json interaction_ingested(const InteractionRecord& record) { return encode(record); }

nlohmann::json candidate_generated(const Candidate& candidate, const chat::ChatRequest& request) {
  nlohmann::json req = {{"model", request.model},
                        {"temperature", request.temperature},
                        {"max_tokens", request.max_tokens},
                        {"seed", nullptr}};
  if (request.seed) req["seed"] = *request.seed;
  return {{"candidate", encode(candidate)}, {"request", std::move(req)}};
}

nlohmann::json generation_failed(const generation::GenerationFailure& failure) {
  return encode(failure);
}

nlohmann::json matchup_issued(const Matchup& matchup) { return encode(matchup); }

nlohmann::json decision_recorded(const Decision& decision) { return encode(decision); }

}  // namespace payload

}  // namespace gauntlet
