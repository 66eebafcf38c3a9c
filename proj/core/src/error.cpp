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

#include "gauntlet/error.hpp"

namespace gauntlet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNumericalFailure: return "numerical_failure";
    case ErrorCode::kTemplateParse: return "template_parse";
    case ErrorCode::kUnknownSlot: return "unknown_slot";
    case ErrorCode::kDuplicateTemplate: return "duplicate_template";
    case ErrorCode::kMissingSlotValue: return "missing_slot_value";
    case ErrorCode::kInteractionValidation: return "interaction_validation";
    case ErrorCode::kDuplicateInteraction: return "duplicate_interaction";
    case ErrorCode::kGenerationFailed: return "generation_failed";
    case ErrorCode::kInsufficientTemplates: return "insufficient_templates";
    case ErrorCode::kNoEligibleMatchup: return "no_eligible_matchup";
    case ErrorCode::kUnknownJudge: return "unknown_judge";
    case ErrorCode::kUnknownMatchup: return "unknown_matchup";
    case ErrorCode::kMatchupNotPendingForJudge: return "matchup_not_pending_for_judge";
    case ErrorCode::kDuplicateDecision: return "duplicate_decision";
    case ErrorCode::kSequenceGap: return "sequence_gap";
    case ErrorCode::kLogCorrupt: return "log_corrupt";
    case ErrorCode::kUnknownEventType: return "unknown_event_type";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kLocked: return "locked";
    case ErrorCode::kUnknownFormat: return "unknown_format";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

}  // namespace gauntlet
