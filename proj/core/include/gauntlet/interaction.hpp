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
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gauntlet/template.hpp"

namespace gauntlet {

enum class SertQuestionType { kLogic, kBridging, kPrediction, kElaboration, kParaphrasing };

std::string_view to_string(SertQuestionType type);
std::optional<SertQuestionType> parse_sert_question_type(std::string_view text);

// One authentic dialogue context a follow-up question is generated for.
struct InteractionRecord {
  std::string interaction_id;
  std::string deployment;
  std::string textbook_title;
  std::string textbook_description;
  std::string passage_text;
  SertQuestionType sert_question_type = SertQuestionType::kLogic;
  std::string sert_question;
  std::string learner_response;  // may be empty

  bool operator==(const InteractionRecord&) const = default;
};

// Values for every canonical slot, keyed by slot name.
templates::SlotValues slot_values(const InteractionRecord& record);

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;
  bool operator==(const TokenUsage&) const = default;
};

// A generated follow-up question for one (template, interaction) pair.
struct Candidate {
  std::string candidate_id;
  std::string template_id;
  std::string interaction_id;
  std::string text;
  std::string finish_reason;
  TokenUsage usage;
  std::string created_at;

  bool operator==(const Candidate&) const = default;
};

// Reads line-delimited JSON interaction records. Blank lines are ignored.
// All-or-nothing: every bad line is reported (with its line number) in a
// single Error(kInteractionValidation); duplicate ids raise
// Error(kDuplicateInteraction).
std::vector<InteractionRecord> ingest_interactions(std::istream& in);

}  // namespace gauntlet
