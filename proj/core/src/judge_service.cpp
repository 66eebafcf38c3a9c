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

#include "gauntlet/judge_service.hpp"

#include <thread>

#include <httplib.h>

#include "gauntlet/error.hpp"
#include "gauntlet/report.hpp"

namespace gauntlet::service {
namespace {

using json = nlohmann::json;

constexpr const char* kJson = "application/json";

// Served at / when no UI build directory was supplied.
constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>Prompt tournament</title></head>
<body>
<h1>Prompt tournament</h1>
<p>The judging UI assets are not installed. Start the service with
<code>--ui-dir</code> pointing at the built UI, or use the JSON API under
<code>/api/</code>.</p>
</body>
</html>
)";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, ErrorCode code, const std::string& message) {
  send_json(res, status, {{"error", std::string(to_string(code))}, {"message", message}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownJudge:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNoEligibleMatchup:
    case ErrorCode::kInsufficientTemplates: return 404;
    case ErrorCode::kDuplicateDecision:
    case ErrorCode::kMatchupNotPendingForJudge:
    case ErrorCode::kUnknownMatchup: return 409;
    default: return 500;
  }
}

}  // namespace

std::string default_instructions() {
  return "Read the passage, the initial question, and the learner's answer. Then pick the "
         "follow-up question you would rather show this learner. Weigh all three together:\n"
         "1. Format: a single, clear question of reasonable length, with no stray "
         "commentary, lists, or answers given away.\n"
         "2. Dialogue support: it responds to what the learner actually wrote and moves the "
         "conversation forward, including when the answer is brief, off-topic, or wrong.\n"
         "3. Appropriateness: it is accurate with respect to the passage and pitched at the "
         "learner's level and tone.\n"
         "If you cannot prefer one over the other (both equally good, or both unusable), "
         "press Skip.";
}

ServiceOptions parse_bind(const std::string& bind, ServiceOptions base) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon + 1 == bind.size()) {
    throw Error(ErrorCode::kConfig, "bind address must look like host:port, got '" + bind + "'");
  }
  base.host = bind.substr(0, colon);
  const std::string port_text = bind.substr(colon + 1);
  std::size_t used = 0;
  int port = -1;
  try {
    port = std::stoi(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::kConfig, "invalid port in bind address '" + bind + "'");
  }
  base.port = port;
  return base;
}

json next_pair_payload(const TournamentState& state, const Matchup& m,
                       const std::string& instructions) {
  const InteractionRecord& interaction = state.interactions.at(m.interaction_id);
  const Candidate& left = state.candidates.at(m.candidate_left);
  const Candidate& right = state.candidates.at(m.candidate_right);
  JudgeTally tally;
  if (const auto it = state.judge_tallies.find(m.issued_to); it != state.judge_tallies.end()) {
    tally = it->second;
  }
  return {{"matchup_id", m.matchup_id},
          {"instructions", instructions},
          {"context",
           {{"deployment", interaction.deployment},
            {"textbook_title", interaction.textbook_title},
            {"passage_text", interaction.passage_text},
            {"sert_question_type", std::string(to_string(interaction.sert_question_type))},
            {"sert_question", interaction.sert_question},
            {"learner_response", interaction.learner_response}}},
          {"left", {{"text", left.text}}},
          {"right", {{"text", right.text}}},
          {"progress",
           {{"decisions_made", tally.decisions},
            {"skips_made", tally.skips},
            {"target_decisions", state.config.target_decisions}}}};
}

struct JudgeService::Impl {
  Tournament& tournament;
  ServiceOptions options;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  Impl(Tournament& t, ServiceOptions o) : tournament(t), options(std::move(o)) { routes(); }

  void routes() {
    server.Get("/api/next-pair", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string judge = req.get_param_value("judge_id");
      if (judge.empty()) {
        send_error(res, 400, ErrorCode::kUnknownJudge, "judge_id is required");
        return;
      }
      try {
        const Matchup m = tournament.next_matchup(judge);
        const json body = tournament.read([&](const TournamentState& s) {
          return next_pair_payload(s, m, options.instructions);
        });
        send_json(res, 200, body);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), e.code(), e.what());
      }
    });

    server.Post("/api/decisions", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error&) {
        send_error(res, 400, ErrorCode::kInvalidArgument, "body must be JSON");
        return;
      }
      const auto text = [&](const char* key) -> std::optional<std::string> {
        if (!body.is_object() || !body.contains(key) || !body[key].is_string()) return {};
        return body[key].get<std::string>();
      };
      const auto judge = text("judge_id");
      const auto matchup = text("matchup_id");
      const auto choice_text = text("choice");
      const auto choice = choice_text ? parse_choice(*choice_text) : std::nullopt;
      if (!judge || !matchup || !choice) {
        send_error(res, 400, ErrorCode::kInvalidArgument,
                   "expected {judge_id, matchup_id, choice: left|right|skip}");
        return;
      }
      try {
        const std::int64_t seq = tournament.submit_decision(*judge, *matchup, *choice);
        send_json(res, 200, {{"ok", true}, {"matchup_id", *matchup}, {"decision_seq", seq}});
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), e.code(), e.what());
      }
    });

    const auto report_route = [this](const char* path, json (*build)(const TournamentState&)) {
      server.Get(path, [this, build](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, tournament.read(build));
      });
    };
    report_route("/api/standings", &report::standings_json);
    report_route("/api/matrix", &report::matrix_json);
    report_route("/api/progress", &report::progress_json);

    bool mounted = false;
    if (options.ui_dir) mounted = server.set_mount_point("/", options.ui_dir->string());
    if (!mounted) {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
      });
    }
  }
};

JudgeService::JudgeService(Tournament& tournament, ServiceOptions options)
    : impl_(std::make_unique<Impl>(tournament, std::move(options))) {}

JudgeService::~JudgeService() { stop(); }

int JudgeService::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (!impl_->server.bind_to_port(impl_->options.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + impl_->options.host + ":" +
                                    std::to_string(impl_->options.port));
  }
  impl_->port = port;
  return port;
}

void JudgeService::serve() { impl_->server.listen_after_bind(); }

int JudgeService::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return port;
}

void JudgeService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace gauntlet::service
