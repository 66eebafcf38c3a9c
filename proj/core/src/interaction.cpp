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

#include "gauntlet/interaction.hpp"

#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gauntlet/codec.hpp"
#include "gauntlet/error.hpp"

namespace gauntlet {

std::string_view to_string(SertQuestionType type) {
  switch (type) {
    case SertQuestionType::kLogic: return "logic";
    case SertQuestionType::kBridging: return "bridging";
    case SertQuestionType::kPrediction: return "prediction";
    case SertQuestionType::kElaboration: return "elaboration";
    case SertQuestionType::kParaphrasing: return "paraphrasing";
  }
  return "logic";
}

std::optional<SertQuestionType> parse_sert_question_type(std::string_view text) {
  for (auto type : {SertQuestionType::kLogic, SertQuestionType::kBridging,
                    SertQuestionType::kPrediction, SertQuestionType::kElaboration,
                    SertQuestionType::kParaphrasing}) {
    if (to_string(type) == text) return type;
  }
  return std::nullopt;
}

templates::SlotValues slot_values(const InteractionRecord& record) {
  return {
      {"textbook_title", record.textbook_title},
      {"textbook_description", record.textbook_description},
      {"passage_text", record.passage_text},
      {"sert_question_type", std::string(to_string(record.sert_question_type))},
      {"sert_question", record.sert_question},
      {"learner_response", record.learner_response},
  };
}

std::vector<InteractionRecord> ingest_interactions(std::istream& in) {
  std::vector<InteractionRecord> records;
  std::vector<std::string> problems;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      problems.push_back("line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
      continue;
    }
    try {
      InteractionRecord record = interaction_from_json(object);
      if (!seen.insert(record.interaction_id).second) {
        throw Error(ErrorCode::kDuplicateInteraction,
                    "line " + std::to_string(line_no) + ": duplicate interaction_id '" +
                        record.interaction_id + "'");
      }
      records.push_back(std::move(record));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDuplicateInteraction) throw;
      problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << problems.size() << " invalid interaction line(s)";
    for (const auto& p : problems) msg << "; " << p;
    throw Error(ErrorCode::kInteractionValidation, msg.str());
  }
  return records;
}

}  // namespace gauntlet
