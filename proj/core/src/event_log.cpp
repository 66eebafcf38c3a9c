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

#include "gauntlet/event_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "gauntlet/error.hpp"

namespace gauntlet {
namespace {

constexpr std::array<std::pair<EventType, std::string_view>, 8> kTypeNames = {{
    {EventType::kTournamentCreated, "TournamentCreated"},
    {EventType::kConfigSet, "ConfigSet"},
    {EventType::kTemplateRegistered, "TemplateRegistered"},
    {EventType::kInteractionIngested, "InteractionIngested"},
    {EventType::kCandidateGenerated, "CandidateGenerated"},
    {EventType::kGenerationFailed, "GenerationFailed"},
    {EventType::kMatchupIssued, "MatchupIssued"},
    {EventType::kDecisionRecorded, "DecisionRecorded"},
}};

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("event log write failed");
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(EventType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "Unknown";
}

std::optional<EventType> parse_event_type(std::string_view text) {
  for (const auto& [t, name] : kTypeNames) {
    if (name == text) return t;
  }
  return std::nullopt;
}

std::string serialize_event(const Event& e) {
  const nlohmann::json line = {{"seq", e.seq},
                               {"ts", e.ts},
                               {"type", std::string(to_string(e.type))},
                               {"payload", e.payload}};
  return line.dump();
}

Event parse_event(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kLogCorrupt, std::string("invalid event JSON: ") + e.what());
  }
  if (!j.is_object() || j.size() != 4 || !j.contains("seq") || !j.contains("ts") ||
      !j.contains("type") || !j.contains("payload")) {
    throw Error(ErrorCode::kLogCorrupt, "event must have exactly {seq, ts, type, payload}");
  }
  if (!j["seq"].is_number_integer() || !j["ts"].is_string() || !j["type"].is_string() ||
      !j["payload"].is_object()) {
    throw Error(ErrorCode::kLogCorrupt, "event fields have the wrong types");
  }
  Event e;
  e.seq = j["seq"].get<std::int64_t>();
  e.ts = j["ts"].get<std::string>();
  const std::string type = j["type"].get<std::string>();
  const auto parsed = parse_event_type(type);
  if (!parsed) {
    throw Error(ErrorCode::kUnknownEventType,
                "unknown event type '" + type + "' at seq " + std::to_string(e.seq));
  }
  e.type = *parsed;
  e.payload = std::move(j["payload"]);
  return e;
}

EventLog EventLog::in_memory() { return EventLog(); }

EventLog EventLog::open(const std::filesystem::path& path) {
  EventLog log;
  log.path_ = path;

  std::string contents;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    contents = buf.str();
  }

  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    const std::size_t nl = contents.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      log.warnings_.push_back("dropped partial trailing line " + std::to_string(line_no) +
                              " (" + std::to_string(contents.size() - pos) + " bytes)");
      break;
    }
    const std::string_view line(contents.data() + pos, nl - pos);
    Event e;
    try {
      e = parse_event(line);
    } catch (const Error& err) {
      throw Error(err.code(), path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
    if (e.seq != log.last_seq() + 1) {
      throw Error(ErrorCode::kSequenceGap, path.string() + ":" + std::to_string(line_no) +
                                               ": expected seq " +
                                               std::to_string(log.last_seq() + 1) + ", found " +
                                               std::to_string(e.seq));
    }
    log.events_.push_back(std::move(e));
    pos = nl + 1;
    good_end = pos;
  }

  log.fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (log.fd_ < 0) io_error("cannot open " + path.string());
  if (good_end < contents.size()) {
    if (::ftruncate(log.fd_, static_cast<off_t>(good_end)) != 0) {
      io_error("cannot truncate " + path.string());
    }
    if (::fsync(log.fd_) != 0) io_error("fsync failed for " + path.string());
  }
  return log;
}

EventLog::EventLog(EventLog&& other) noexcept
    : events_(std::move(other.events_)),
      warnings_(std::move(other.warnings_)),
      path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    events_ = std::move(other.events_);
    warnings_ = std::move(other.warnings_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(const Event& event) {
  if (event.seq != last_seq() + 1) {
    throw Error(ErrorCode::kSequenceGap, "append expected seq " + std::to_string(last_seq() + 1) +
                                             ", got " + std::to_string(event.seq));
  }
  if (fd_ >= 0) {
    write_all(fd_, serialize_event(event) + "\n");
    if (::fsync(fd_) != 0) io_error("event log fsync failed");
  }
  events_.push_back(event);
}

}  // namespace gauntlet
