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

// A tournament bound to its event log. Every mutation builds an event,
// folds it into the in-memory state, and appends it to the log before
// returning; mutations are serialized and reads share a lock.

#include <filesystem>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gauntlet/chat_client.hpp"
#include "gauntlet/event_log.hpp"
#include "gauntlet/generation.hpp"
#include "gauntlet/template.hpp"
#include "gauntlet/time_util.hpp"
#include "gauntlet/tournament_state.hpp"

namespace gauntlet {

struct TemplateRegistration {
  std::string template_id;
  bool newly_registered = false;
  std::vector<templates::LintWarning> warnings;
};

struct IngestResult {
  std::size_t added = 0;
  std::size_t unchanged = 0;
};

class Tournament {
 public:
  explicit Tournament(EventLog log, Clock clock = utc_now_rfc3339);

  static Tournament open(const std::filesystem::path& log_path, Clock clock = utc_now_rfc3339);
  static Tournament in_memory(Clock clock = utc_now_rfc3339);

  // Appends TournamentCreated when the log is empty, then ConfigSet when
  // `config` differs from the recorded one. Returns true if anything changed.
  bool ensure_config(const std::string& tournament_id, const TournamentConfig& config);

  // Idempotent for an identical source; a different source under an existing
  // id raises Error(kDuplicateTemplate).
  TemplateRegistration register_template(const std::string& source);

  // All-or-nothing. Records identical to ingested ones are skipped; a
  // conflicting record with a known id raises Error(kDuplicateInteraction).
  IngestResult ingest(const std::vector<InteractionRecord>& records);

  void record_candidate(const Candidate& candidate, const chat::ChatRequest& request);
  void record_generation_failure(const generation::GenerationFailure& failure);

  // Runs candidate generation for every missing (template, interaction) pair.
  generation::GenerationSummary generate(const generation::GenerationConfig& config,
                                         const chat::ChatClient& client);

  // Returns the judge's oldest pending matchup, or issues a new one.
  // Throws kUnknownJudge, kInsufficientTemplates, kNoEligibleMatchup.
  Matchup next_matchup(const std::string& judge_id);

  // Returns the new decision_seq.
  std::int64_t submit_decision(const std::string& judge_id, const std::string& matchup_id,
                               Choice choice);

  template <typename Fn>
  auto read(Fn&& fn) const {
    std::shared_lock lock(mutex_);
    return std::forward<Fn>(fn)(state_);
  }

  TournamentState snapshot() const;
  std::vector<Event> events() const;
  std::vector<std::string> log_warnings() const;

 private:
  // Caller holds the unique lock.
  void commit(EventType type, nlohmann::json payload);

  mutable std::shared_mutex mutex_;
  EventLog log_;
  TournamentState state_;
  Clock clock_;
};

}  // namespace gauntlet
