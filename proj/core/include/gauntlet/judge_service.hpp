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

// HTTP front end for judges and operators.
//
//   GET  /api/next-pair?judge_id=J   blinded matchup for judge J
//   POST /api/decisions              {judge_id, matchup_id, choice}
//   GET  /api/standings              operator view
//   GET  /api/matrix                 operator view
//   GET  /api/progress               per-judge counts vs target
//   GET  /                           judging UI static assets
//
// Judge-facing payloads never carry template or candidate identifiers.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "gauntlet/tournament.hpp"

namespace gauntlet::service {

// Rubric and task instructions shown to judges.
std::string default_instructions();

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 7878;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;
  std::string instructions = default_instructions();
};

// Parses "host:port" (as given to --bind).
ServiceOptions parse_bind(const std::string& bind, ServiceOptions base = {});

// Judge-facing body for a matchup.
nlohmann::json next_pair_payload(const TournamentState& state, const Matchup& matchup,
                                 const std::string& instructions);

class JudgeService {
 public:
  JudgeService(Tournament& tournament, ServiceOptions options);
  ~JudgeService();
  JudgeService(const JudgeService&) = delete;
  JudgeService& operator=(const JudgeService&) = delete;

  // Binds the socket and returns the bound port. Throws Error(kIo).
  int bind();
  // Serves until stop(); bind() must have succeeded.
  void serve();
  // bind() + serve() on a background thread; returns the port.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gauntlet::service
