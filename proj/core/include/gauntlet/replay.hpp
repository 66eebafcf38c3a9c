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

#include <span>

#include "gauntlet/chat_client.hpp"
#include "gauntlet/event_log.hpp"
#include "gauntlet/tournament_state.hpp"

namespace gauntlet {

// Folds one event into the state. Validates before mutating, so on any throw
// the state is unchanged. Requires event.seq == state.last_seq + 1.
void apply_event(TournamentState& state, const Event& event);

// Left fold of apply_event over `events` from an empty state.
TournamentState replay(std::span<const Event> events);

// Payload builders, one per event type.
namespace payload {

nlohmann::json tournament_created(const std::string& tournament_id, const std::string& name);
nlohmann::json config_set(const TournamentConfig& config);
nlohmann::json template_registered(const std::string& template_id, const std::string& source);
nlohmann::json interaction_ingested(const InteractionRecord& record);
nlohmann::json candidate_generated(const Candidate& candidate, const chat::ChatRequest& request);
nlohmann::json generation_failed(const generation::GenerationFailure& failure);
nlohmann::json matchup_issued(const Matchup& matchup);
nlohmann::json decision_recorded(const Decision& decision);

}  // namespace payload

}  // namespace gauntlet
