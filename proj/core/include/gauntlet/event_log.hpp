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

// Append-only JSON-lines event log. Each line is exactly
//   {"payload": {...}, "seq": N, "ts": "<RFC 3339 UTC>", "type": "<EventType>"}
// with seq gapless from 1. An append is fsync'd before it returns.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gauntlet {

enum class EventType {
  kTournamentCreated,
  kConfigSet,
  kTemplateRegistered,
  kInteractionIngested,
  kCandidateGenerated,
  kGenerationFailed,
  kMatchupIssued,
  kDecisionRecorded,
};

std::string_view to_string(EventType type);
std::optional<EventType> parse_event_type(std::string_view text);

struct Event {
  std::int64_t seq = 0;
  std::string ts;
  EventType type = EventType::kTournamentCreated;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Event&) const = default;
};

std::string serialize_event(const Event& event);
// Throws Error(kUnknownEventType) naming the seq, or Error(kLogCorrupt).
Event parse_event(std::string_view line);

class EventLog {
 public:
  // Log held only in memory (simulations, tests).
  static EventLog in_memory();

  // Opens or creates the file. A partial trailing line (no terminating
  // newline) is dropped, the file truncated to the last complete line, and a
  // warning recorded. Gaps or corrupt complete lines are fatal.
  static EventLog open(const std::filesystem::path& path);

  EventLog(EventLog&& other) noexcept;
  EventLog& operator=(EventLog&& other) noexcept;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  ~EventLog();

  // Requires event.seq == last_seq() + 1 (Error(kSequenceGap) otherwise).
  void append(const Event& event);

  const std::vector<Event>& events() const { return events_; }
  std::int64_t last_seq() const { return events_.empty() ? 0 : events_.back().seq; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  EventLog() = default;

  std::vector<Event> events_;
  std::vector<std::string> warnings_;
  std::optional<std::filesystem::path> path_;
  int fd_ = -1;
};

}  // namespace gauntlet
