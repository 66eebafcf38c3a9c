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

#include "gauntlet/template.hpp"

#include <algorithm>
#include <sstream>

#include "gauntlet/error.hpp"

namespace gauntlet::templates {
namespace {

constexpr std::string_view kDelimiter = "--- role:";
constexpr std::string_view kSlotOpen = "{{";
constexpr std::string_view kSlotClose = "}}";

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::kTemplateParse,
              "template parse error at byte " + std::to_string(offset) + ": " + what);
}

struct Line {
  std::string_view text;  // without the terminating '\n'
  std::size_t begin = 0;  // offset of the first byte
  std::size_t end = 0;    // offset one past the '\n' (or EOF)
};

std::vector<Line> split_lines(std::string_view source) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < source.size()) {
    const std::size_t nl = source.find('\n', pos);
    const std::size_t stop = nl == std::string_view::npos ? source.size() : nl;
    const std::size_t next = nl == std::string_view::npos ? source.size() : nl + 1;
    lines.push_back({source.substr(pos, stop - pos), pos, next});
    pos = next;
  }
  return lines;
}

bool is_delimiter(std::string_view line) { return line.starts_with(kDelimiter); }

void append_literal(std::vector<Segment>& segments, std::string_view text) {
  if (text.empty()) return;
  if (!segments.empty()) {
    if (auto* lit = std::get_if<Literal>(&segments.back())) {
      lit->text.append(text);
      return;
    }
  }
  segments.emplace_back(Literal{std::string(text)});
}

std::vector<Segment> tokenize_body(std::string_view body, std::size_t body_offset,
                                   const SlotRegistry& registry) {
  std::vector<Segment> segments;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t open = body.find(kSlotOpen, pos);
    if (open == std::string_view::npos) {
      append_literal(segments, body.substr(pos));
      break;
    }
    append_literal(segments, body.substr(pos, open - pos));
    const std::size_t close = body.find(kSlotClose, open + kSlotOpen.size());
    if (close == std::string_view::npos) {
      parse_error(body_offset + open, "unclosed '{{'");
    }
    const std::string_view name =
        body.substr(open + kSlotOpen.size(), close - open - kSlotOpen.size());
    if (!is_valid_slot_name(name)) {
      parse_error(body_offset + open,
                  "malformed slot token '{{" + std::string(name) + "}}'");
    }
    const auto scope = registry.find(name);
    if (!scope) {
      throw Error(ErrorCode::kUnknownSlot,
                  "unknown slot '" + std::string(name) + "' at byte " +
                      std::to_string(body_offset + open));
    }
    segments.emplace_back(Slot{std::string(name), *scope});
    pos = close + kSlotClose.size();
  }
  return segments;
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "system") return Role::kSystem;
  if (text == "user") return Role::kUser;
  if (text == "assistant") return Role::kAssistant;
  return std::nullopt;
}

std::string_view to_string(SlotScope scope) {
  return scope == SlotScope::kTournament ? "tournament" : "interaction";
}

std::optional<SlotScope> parse_scope(std::string_view text) {
  if (text == "tournament") return SlotScope::kTournament;
  if (text == "interaction") return SlotScope::kInteraction;
  return std::nullopt;
}

SlotRegistry SlotRegistry::canonical() {
  SlotRegistry registry;
  registry.declare("textbook_title", SlotScope::kTournament);
  registry.declare("textbook_description", SlotScope::kTournament);
  registry.declare("passage_text", SlotScope::kInteraction);
  registry.declare("sert_question_type", SlotScope::kInteraction);
  registry.declare("sert_question", SlotScope::kInteraction);
  registry.declare("learner_response", SlotScope::kInteraction);
  return registry;
}

void SlotRegistry::declare(const std::string& name, SlotScope scope) {
  if (!is_valid_slot_name(name)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid slot name '" + name + "'");
  }
  slots_[name] = scope;
}

std::optional<SlotScope> SlotRegistry::find(std::string_view name) const {
  const auto it = slots_.find(name);
  if (it == slots_.end()) return std::nullopt;
  return it->second;
}

bool is_valid_slot_name(std::string_view name) {
  if (name.empty()) return false;
  const auto head = [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; };
  const auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  return head(name.front()) && std::all_of(name.begin() + 1, name.end(), tail);
}

bool is_valid_template_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::set<std::string> PromptTemplate::slot_names() const {
  std::set<std::string> names;
  for (const auto& message : messages) {
    for (const auto& segment : message.segments) {
      if (const auto* slot = std::get_if<Slot>(&segment)) names.insert(slot->name);
    }
  }
  return names;
}

PromptTemplate parse_template(std::string_view source, const SlotRegistry& registry) {
  const std::vector<Line> lines = split_lines(source);
  PromptTemplate tmpl;
  bool have_id = false;
  bool have_name = false;

  std::size_t i = 0;
  for (; i < lines.size() && !is_delimiter(lines[i].text); ++i) {
    const Line& line = lines[i];
    if (trim(line.text).empty()) continue;
    const std::size_t colon = line.text.find(':');
    if (colon == std::string_view::npos) {
      parse_error(line.begin, "expected 'key: value' header line");
    }
    const std::string_view key = trim(line.text.substr(0, colon));
    const std::string value(trim(line.text.substr(colon + 1)));
    if (key == "id") {
      if (!is_valid_template_id(value)) {
        parse_error(line.begin, "invalid template id '" + value + "'");
      }
      tmpl.template_id = value;
      have_id = true;
    } else if (key == "name") {
      tmpl.name = value;
      have_name = true;
    } else if (key == "description") {
      tmpl.description = value;
    } else {
      parse_error(line.begin, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_id) parse_error(0, "missing 'id:' header");
  if (!have_name) parse_error(0, "missing 'name:' header");
  if (i == lines.size()) parse_error(source.size(), "no '--- role:' message blocks");

  while (i < lines.size()) {
    const Line& delim = lines[i];
    const std::string_view role_text = trim(delim.text.substr(kDelimiter.size()));
    const auto role = parse_role(role_text);
    if (!role) {
      parse_error(delim.begin, "unknown role '" + std::string(role_text) + "'");
    }
    std::size_t j = i + 1;
    while (j < lines.size() && !is_delimiter(lines[j].text)) ++j;
    const std::size_t body_begin = delim.end;
    const std::size_t body_end = j < lines.size() ? lines[j].begin : source.size();
    const std::string_view body = source.substr(body_begin, body_end - body_begin);
    if (body.empty()) parse_error(delim.begin, "empty message body");
    tmpl.messages.push_back({*role, tokenize_body(body, body_begin, registry)});
    i = j;
  }
  return tmpl;
}

std::string serialize_template(const PromptTemplate& tmpl) {
  std::string out;
  out += "id: " + tmpl.template_id + "\n";
  out += "name: " + tmpl.name + "\n";
  out += "description: " + tmpl.description + "\n";
  for (const auto& message : tmpl.messages) {
    out += "--- role: ";
    out += to_string(message.role);
    out += '\n';
    for (const auto& segment : message.segments) {
      if (const auto* lit = std::get_if<Literal>(&segment)) {
        out += lit->text;
      } else {
        out += "{{" + std::get<Slot>(segment).name + "}}";
      }
    }
  }
  return out;
}

RenderedPrompt render(const PromptTemplate& tmpl, const SlotValues& values) {
  std::vector<std::string> missing;
  for (const auto& name : tmpl.slot_names()) {
    if (!values.contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& name : missing) {
      if (!list.empty()) list += ", ";
      list += name;
    }
    throw Error(ErrorCode::kMissingSlotValue, "missing slot values: [" + list + "]");
  }

  RenderedPrompt out;
  bool prefix_open = true;
  for (const auto& message : tmpl.messages) {
    std::string content;
    bool is_static = true;
    for (const auto& segment : message.segments) {
      if (const auto* lit = std::get_if<Literal>(&segment)) {
        content += lit->text;
      } else {
        const auto& slot = std::get<Slot>(segment);
        content += values.find(slot.name)->second;
        if (slot.scope == SlotScope::kInteraction) is_static = false;
      }
    }
    if (prefix_open && is_static) {
      ++out.static_prefix_count;
    } else {
      prefix_open = false;
    }
    out.messages.push_back({message.role, std::move(content)});
  }
  return out;
}

std::vector<LintWarning> lint_prefix_order(const PromptTemplate& tmpl,
                                           const SlotRegistry& registry) {
  struct Position {
    std::size_t message;
    std::size_t segment;
    auto operator<=>(const Position&) const = default;
  };
  // Registry scope wins over the scope recorded at parse time.
  const auto scope_of = [&](const Slot& slot) {
    return registry.find(slot.name).value_or(slot.scope);
  };

  std::optional<Position> last_tournament;
  for (std::size_t m = 0; m < tmpl.messages.size(); ++m) {
    const auto& segments = tmpl.messages[m].segments;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto* slot = std::get_if<Slot>(&segments[s]);
      if (slot && scope_of(*slot) == SlotScope::kTournament) last_tournament = Position{m, s};
    }
  }

  std::vector<LintWarning> warnings;
  for (std::size_t m = 0; m < tmpl.messages.size(); ++m) {
    const auto& segments = tmpl.messages[m].segments;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto* slot = std::get_if<Slot>(&segments[s]);
      if (!slot || scope_of(*slot) != SlotScope::kInteraction) continue;
      if (m == 0) {
        warnings.push_back({slot->name, m, "interaction-scoped slot in the first message"});
      } else if (last_tournament && Position{m, s} < *last_tournament) {
        warnings.push_back(
            {slot->name, m, "interaction-scoped slot before the last tournament-scoped slot"});
      }
    }
  }
  return warnings;
}

}  // namespace gauntlet::templates
