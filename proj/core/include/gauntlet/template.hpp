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

// Prompt templates: a small header (id, name, description) followed by chat
// message blocks whose bodies mix literal text with `{{slot}}` tokens.
//
//   id: socratic_guide
//   name: Socratic Guide
//   description: Asks one probing question.
//   --- role: system
//   You are tutoring with "{{textbook_title}}".
//   --- role: user
//   {{learner_response}}
//
// Body bytes are preserved exactly; the newline that ends the last line of a
// block belongs to that block. There is no escape for a literal "{{".

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gauntlet::templates {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

enum class SlotScope { kTournament, kInteraction };

std::string_view to_string(SlotScope scope);
std::optional<SlotScope> parse_scope(std::string_view text);

// Slot name -> scope. Tournament-scoped slots are identical for every request
// in a tournament; interaction-scoped slots change per request.
class SlotRegistry {
 public:
  // textbook_title, textbook_description (tournament); passage_text,
  // sert_question_type, sert_question, learner_response (interaction).
  static SlotRegistry canonical();

  void declare(const std::string& name, SlotScope scope);
  std::optional<SlotScope> find(std::string_view name) const;
  const std::map<std::string, SlotScope, std::less<>>& entries() const { return slots_; }

  bool operator==(const SlotRegistry&) const = default;

 private:
  std::map<std::string, SlotScope, std::less<>> slots_;
};

bool is_valid_slot_name(std::string_view name);

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

struct Slot {
  std::string name;
  SlotScope scope = SlotScope::kInteraction;
  bool operator==(const Slot&) const = default;
};

using Segment = std::variant<Literal, Slot>;

struct TemplateMessage {
  Role role = Role::kUser;
  std::vector<Segment> segments;
  bool operator==(const TemplateMessage&) const = default;
};

struct PromptTemplate {
  std::string template_id;
  std::string name;
  std::string description;
  std::vector<TemplateMessage> messages;

  std::set<std::string> slot_names() const;
  bool operator==(const PromptTemplate&) const = default;
};

bool is_valid_template_id(std::string_view id);

// Throws Error(kTemplateParse) with the byte offset of the problem, or
// Error(kUnknownSlot) for a well-formed slot the registry does not declare.
PromptTemplate parse_template(std::string_view source, const SlotRegistry& registry);

std::string serialize_template(const PromptTemplate& tmpl);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct RenderedPrompt {
  std::vector<ChatMessage> messages;
  // Leading messages that only use literals and tournament-scoped slots.
  std::size_t static_prefix_count = 0;
};

using SlotValues = std::map<std::string, std::string, std::less<>>;

// Substitutes values verbatim. Throws Error(kMissingSlotValue) listing every
// missing name; extra values are ignored.
RenderedPrompt render(const PromptTemplate& tmpl, const SlotValues& values);

struct LintWarning {
  std::string slot;
  std::size_t message_index = 0;
  std::string reason;
};

// Flags interaction-scoped slots that would break prefix caching: any that
// appear in the first message or before the last tournament-scoped slot.
std::vector<LintWarning> lint_prefix_order(const PromptTemplate& tmpl,
                                           const SlotRegistry& registry);

}  // namespace gauntlet::templates
