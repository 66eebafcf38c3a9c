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

// JSON encodings shared by the event log, the CLI, and the HTTP service.
// Decoders are strict: missing or mistyped fields raise Error, and records
// with a fixed field set reject unknown keys.

#include <nlohmann/json.hpp>

#include "gauntlet/generation.hpp"
#include "gauntlet/interaction.hpp"
#include "gauntlet/rating.hpp"
#include "gauntlet/tournament_state.hpp"

namespace gauntlet {

using json = nlohmann::json;

json encode(const rating::RatingConfig& config);
json encode(const SchedulerPolicy& policy);
json encode(const TournamentConfig& config);
json encode(const InteractionRecord& record);
json encode(const TokenUsage& usage);
json encode(const Candidate& candidate);
json encode(const generation::GenerationFailure& failure);
json encode(const Matchup& matchup);
json encode(const Decision& decision);

rating::RatingConfig rating_config_from_json(const json& j);
SchedulerPolicy scheduler_policy_from_json(const json& j);
TournamentConfig tournament_config_from_json(const json& j);
// Requires exactly the InteractionRecord field names; throws
// Error(kInteractionValidation) naming the offending field.
InteractionRecord interaction_from_json(const json& j);
TokenUsage token_usage_from_json(const json& j);
Candidate candidate_from_json(const json& j);
generation::GenerationFailure generation_failure_from_json(const json& j);
Matchup matchup_from_json(const json& j);
Decision decision_from_json(const json& j);

}  // namespace gauntlet
