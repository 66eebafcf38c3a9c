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

#include "gauntlet/tournament.hpp"

#include "gauntlet/codec.hpp"
#include "gauntlet/error.hpp"
#include "gauntlet/replay.hpp"
#include "gauntlet/scheduler.hpp"

namespace gauntlet {

Tournament::Tournament(EventLog log, Clock clock)
    : log_(std::move(log)), state_(replay(log_.events())), clock_(std::move(clock)) {}

Tournament Tournament::open(const std::filesystem::path& log_path, Clock clock) {
  return Tournament(EventLog::open(log_path), std::move(clock));
}

Tournament Tournament::in_memory(Clock clock) {
  return Tournament(EventLog::in_memory(), std::move(clock));
}

void Tournament::commit(EventType type, nlohmann::json payload) {
  Event event{log_.last_seq() + 1, clock_(), type, std::move(payload)};
  apply_event(state_, event);
  try {
    log_.append(event);
  } catch (...) {
    // The event is not durable; rebuild from what is.
    state_ = replay(log_.events());
    throw;
  }
}

bool Tournament::ensure_config(const std::string& tournament_id,
                               const TournamentConfig& config) {
  config.validate();
  std::unique_lock lock(mutex_);
  bool changed = false;
  if (!state_.created) {
    commit(EventType::kTournamentCreated, payload::tournament_created(tournament_id, config.name));
    changed = true;
  }
  if (changed || !(state_.config == config)) {
    commit(EventType::kConfigSet, payload::config_set(config));
    changed = true;
  }
  return changed;
}

TemplateRegistration Tournament::register_template(const std::string& source) {
  std::unique_lock lock(mutex_);
  const templates::PromptTemplate tmpl = templates::parse_template(source, state_.config.slots);
  TemplateRegistration out{tmpl.template_id, false,
                           templates::lint_prefix_order(tmpl, state_.config.slots)};
  if (const auto it = state_.templates.find(tmpl.template_id); it != state_.templates.end()) {
    if (it->second.source == source) return out;
    throw Error(ErrorCode::kDuplicateTemplate,
                "template id '" + tmpl.template_id + "' is already registered with different text");
  }
  commit(EventType::kTemplateRegistered, payload::template_registered(tmpl.template_id, source));
  out.newly_registered = true;
  return out;
}

IngestResult Tournament::ingest(const std::vector<InteractionRecord>& records) {
  std::unique_lock lock(mutex_);
  IngestResult result;
  std::vector<const InteractionRecord*> fresh;
  std::set<std::string, std::less<>> batch;
  for (const auto& record : records) {
    if (!batch.insert(record.interaction_id).second) {
      throw Error(ErrorCode::kDuplicateInteraction,
                  "duplicate interaction_id '" + record.interaction_id + "' in input");
    }
    if (const auto it = state_.interactions.find(record.interaction_id);
        it != state_.interactions.end()) {
      if (!(it->second == record)) {
        throw Error(ErrorCode::kDuplicateInteraction,
                    "interaction '" + record.interaction_id +
                        "' is already ingested with different content");
      }
      ++result.unchanged;
      continue;
    }
    // Same validation the log fold applies.
    interaction_from_json(encode(record));
    fresh.push_back(&record);
  }
  for (const InteractionRecord* record : fresh) {
    commit(EventType::kInteractionIngested, payload::interaction_ingested(*record));
    ++result.added;
  }
  return result;
}

void Tournament::record_candidate(const Candidate& candidate, const chat::ChatRequest& request) {
  std::unique_lock lock(mutex_);
  commit(EventType::kCandidateGenerated, payload::candidate_generated(candidate, request));
}

void Tournament::record_generation_failure(const generation::GenerationFailure& failure) {
  std::unique_lock lock(mutex_);
  commit(EventType::kGenerationFailed, payload::generation_failed(failure));
}

generation::GenerationSummary Tournament::generate(const generation::GenerationConfig& config,
                                                   const chat::ChatClient& client) {
  std::vector<templates::PromptTemplate> templates;
  std::vector<InteractionRecord> interactions;
  std::set<generation::PairKey> cached;
  read([&](const TournamentState& s) {
    for (const auto& [id, entry] : s.templates) templates.push_back(entry.tmpl);
    for (const auto& iid : s.interaction_order) interactions.push_back(s.interactions.at(iid));
    for (const auto& [key, cid] : s.candidate_index) cached.insert(key);
    return 0;
  });
  generation::GenerationSink sink{
      [this](const Candidate& c, const chat::ChatRequest& r) { record_candidate(c, r); },
      [this](const generation::GenerationFailure& f) { record_generation_failure(f); }};
  return generation::generate_all(templates, interactions, config, client, cached, sink, clock_);
}

Matchup Tournament::next_matchup(const std::string& judge_id) {
  std::unique_lock lock(mutex_);
  if (!state_.has_judge(judge_id)) {
    throw Error(ErrorCode::kUnknownJudge, "unknown judge '" + judge_id + "'");
  }
  if (const Matchup* held = state_.pending_for(judge_id)) return *held;
  const Matchup m = scheduler::next_matchup(state_, judge_id, state_.config.policy, clock_());
  commit(EventType::kMatchupIssued, payload::matchup_issued(m));
  return m;
}

std::int64_t Tournament::submit_decision(const std::string& judge_id,
                                         const std::string& matchup_id, Choice choice) {
  std::unique_lock lock(mutex_);
  if (!state_.has_judge(judge_id)) {
    throw Error(ErrorCode::kUnknownJudge, "unknown judge '" + judge_id + "'");
  }
  commit(EventType::kDecisionRecorded,
         payload::decision_recorded({judge_id, matchup_id, choice, clock_()}));
  return state_.decision_seq;
}

TournamentState Tournament::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::vector<Event> Tournament::events() const {
  std::shared_lock lock(mutex_);
  return log_.events();
}

std::vector<std::string> Tournament::log_warnings() const {
  std::shared_lock lock(mutex_);
  return log_.warnings();
}

}  // namespace gauntlet
