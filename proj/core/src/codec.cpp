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

#include "gauntlet/codec.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "gauntlet/error.hpp"

namespace gauntlet {
namespace {

const json& field(const json& j, const char* name, ErrorCode code = ErrorCode::kLogCorrupt) {
  if (!j.is_object()) throw Error(code, "expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw Error(code, std::string("missing field '") + name + "'");
  return *it;
}

std::string str(const json& j, const char* name, ErrorCode code = ErrorCode::kLogCorrupt) {
  const json& v = field(j, name, code);
  if (!v.is_string()) throw Error(code, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::int64_t integer(const json& j, const char* name, ErrorCode code = ErrorCode::kLogCorrupt) {
  const json& v = field(j, name, code);
  if (!v.is_number_integer()) {
    throw Error(code, std::string("field '") + name + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

template <typename T>
T value_or(const json& j, const char* name, T fallback) {
  const auto it = j.find(name);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfig, std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

json encode(const rating::RatingConfig& c) {
  return {{"scale_constant", c.scale_constant},
          {"base_rating", c.base_rating},
          {"base_rd", c.base_rd},
          {"base_sigma", c.base_sigma},
          {"tau", c.tau},
          {"convergence_tolerance", c.convergence_tolerance},
          {"max_iterations", c.max_iterations},
          {"inflate_inactive", c.inflate_inactive}};
}

rating::RatingConfig rating_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "rating config must be an object");
  rating::RatingConfig c;
  c.scale_constant = value_or(j, "scale_constant", c.scale_constant);
  c.base_rating = value_or(j, "base_rating", c.base_rating);
  c.base_rd = value_or(j, "base_rd", c.base_rd);
  c.base_sigma = value_or(j, "base_sigma", c.base_sigma);
  c.tau = value_or(j, "tau", c.tau);
  c.convergence_tolerance = value_or(j, "convergence_tolerance", c.convergence_tolerance);
  c.max_iterations = value_or(j, "max_iterations", c.max_iterations);
  c.inflate_inactive = value_or(j, "inflate_inactive", c.inflate_inactive);
  c.validate();
  return c;
}

json encode(const SchedulerPolicy& p) {
  return {{"epsilon", p.epsilon}, {"coverage_floor", p.coverage_floor}, {"rng_seed", p.rng_seed}};
}

SchedulerPolicy scheduler_policy_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "scheduler policy must be an object");
  SchedulerPolicy p;
  p.epsilon = value_or(j, "epsilon", p.epsilon);
  p.coverage_floor = value_or(j, "coverage_floor", p.coverage_floor);
  p.rng_seed = value_or(j, "rng_seed", p.rng_seed);
  p.validate();
  return p;
}

json encode(const TournamentConfig& c) {
  json judges = json::array();
  for (const auto& judge : c.judges) {
    judges.push_back({{"judge_id", judge.judge_id}, {"display_name", judge.display_name}});
  }
  json slots = json::object();
  for (const auto& [name, scope] : c.slots.entries()) {
    slots[name] = std::string(templates::to_string(scope));
  }
  return {{"name", c.name},
          {"rating", encode(c.rating)},
          {"scheduler", encode(c.policy)},
          {"judges", std::move(judges)},
          {"target_decisions", c.target_decisions},
          {"slots", std::move(slots)}};
}

TournamentConfig tournament_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "tournament config must be an object");
  TournamentConfig c;
  c.name = value_or<std::string>(j, "name", "");
  if (j.contains("rating")) c.rating = rating_config_from_json(j["rating"]);
  if (j.contains("scheduler")) c.policy = scheduler_policy_from_json(j["scheduler"]);
  c.target_decisions = value_or(j, "target_decisions", c.target_decisions);
  if (const auto it = j.find("judges"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kConfig, "judges must be an array");
    for (const auto& entry : *it) {
      JudgeConfig judge;
      if (entry.is_string()) {
        judge.judge_id = entry.get<std::string>();
        judge.display_name = judge.judge_id;
      } else {
        judge.judge_id = str(entry, "judge_id", ErrorCode::kConfig);
        judge.display_name = value_or(entry, "display_name", judge.judge_id);
      }
      c.judges.push_back(std::move(judge));
    }
  }
  if (const auto it = j.find("slots"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::kConfig, "slots must be an object");
    templates::SlotRegistry registry;
    for (const auto& [name, scope_text] : it->items()) {
      const auto scope =
          scope_text.is_string() ? templates::parse_scope(scope_text.get<std::string>())
                                 : std::nullopt;
      if (!scope) throw Error(ErrorCode::kConfig, "slot '" + name + "' has an invalid scope");
      registry.declare(name, *scope);
    }
    c.slots = std::move(registry);
  }
  c.validate();
  return c;
}

json encode(const InteractionRecord& r) {
  return {{"interaction_id", r.interaction_id},
          {"deployment", r.deployment},
          {"textbook_title", r.textbook_title},
          {"textbook_description", r.textbook_description},
          {"passage_text", r.passage_text},
          {"sert_question_type", std::string(to_string(r.sert_question_type))},
          {"sert_question", r.sert_question},
          {"learner_response", r.learner_response}};
}

InteractionRecord interaction_from_json(const json& j) {
  constexpr auto kCode = ErrorCode::kInteractionValidation;
  static const std::array<const char*, 8> kFields = {
      "interaction_id", "deployment", "textbook_title", "textbook_description",
      "passage_text", "sert_question_type", "sert_question", "learner_response"};
  if (!j.is_object()) throw Error(kCode, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(kFields.begin(), kFields.end(),
                     [&](const char* f) { return key == f; }) == kFields.end()) {
      throw Error(kCode, "unknown field '" + key + "'");
    }
  }
  const auto required = [&](const char* name) {
    std::string value = str(j, name, kCode);
    if (value.empty()) throw Error(kCode, std::string("field '") + name + "' must be non-empty");
    return value;
  };
  InteractionRecord r;
  r.interaction_id = required("interaction_id");
  r.deployment = required("deployment");
  r.textbook_title = required("textbook_title");
  r.textbook_description = required("textbook_description");
  r.passage_text = required("passage_text");
  const std::string type = required("sert_question_type");
  const auto parsed = parse_sert_question_type(type);
  if (!parsed) throw Error(kCode, "field 'sert_question_type' has unknown value '" + type + "'");
  r.sert_question_type = *parsed;
  r.sert_question = required("sert_question");
  r.learner_response = str(j, "learner_response", kCode);
  return r;
}

json encode(const TokenUsage& u) {
  return {{"prompt_tokens", u.prompt_tokens},
          {"completion_tokens", u.completion_tokens},
          {"total_tokens", u.total_tokens}};
}

TokenUsage token_usage_from_json(const json& j) {
  return {integer(j, "prompt_tokens"), integer(j, "completion_tokens"),
          integer(j, "total_tokens")};
}

json encode(const Candidate& c) {
  return {{"candidate_id", c.candidate_id},   {"template_id", c.template_id},
          {"interaction_id", c.interaction_id}, {"text", c.text},
          {"finish_reason", c.finish_reason}, {"token_usage", encode(c.usage)},
          {"created_at", c.created_at}};
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.candidate_id = str(j, "candidate_id");
  c.template_id = str(j, "template_id");
  c.interaction_id = str(j, "interaction_id");
  c.text = str(j, "text");
  c.finish_reason = str(j, "finish_reason");
  c.usage = token_usage_from_json(field(j, "token_usage"));
  c.created_at = str(j, "created_at");
  return c;
}

json encode(const generation::GenerationFailure& f) {
  return {{"template_id", f.template_id},
          {"interaction_id", f.interaction_id},
          {"attempts", f.attempts},
          {"error", f.error}};
}

generation::GenerationFailure generation_failure_from_json(const json& j) {
  return {str(j, "template_id"), str(j, "interaction_id"),
          static_cast<int>(integer(j, "attempts")), str(j, "error")};
}

json encode(const Matchup& m) {
  return {{"matchup_id", m.matchup_id},
          {"interaction_id", m.interaction_id},
          {"candidate_left", m.candidate_left},
          {"candidate_right", m.candidate_right},
          {"template_left", m.template_left},
          {"template_right", m.template_right},
          {"issued_to", m.issued_to},
          {"issued_at", m.issued_at},
          {"mode", std::string(to_string(m.mode))}};
}

Matchup matchup_from_json(const json& j) {
  Matchup m;
  m.matchup_id = str(j, "matchup_id");
  m.interaction_id = str(j, "interaction_id");
  m.candidate_left = str(j, "candidate_left");
  m.candidate_right = str(j, "candidate_right");
  m.template_left = str(j, "template_left");
  m.template_right = str(j, "template_right");
  m.issued_to = str(j, "issued_to");
  m.issued_at = str(j, "issued_at");
  const auto mode = parse_matchup_mode(str(j, "mode"));
  if (!mode) throw Error(ErrorCode::kLogCorrupt, "unknown matchup mode");
  m.mode = *mode;
  return m;
}

json encode(const Decision& d) {
  return {{"judge_id", d.judge_id},
          {"matchup_id", d.matchup_id},
          {"choice", std::string(to_string(d.choice))},
          {"ts", d.ts}};
}

Decision decision_from_json(const json& j) {
  Decision d;
  d.judge_id = str(j, "judge_id");
  d.matchup_id = str(j, "matchup_id");
  const auto choice = parse_choice(str(j, "choice"));
  if (!choice) throw Error(ErrorCode::kLogCorrupt, "unknown decision choice");
  d.choice = *choice;
  d.ts = str(j, "ts");
  return d;
}

}  // namespace gauntlet
