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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <memory>
#include <string>
#include <vector>

#include "gauntlet/error.hpp"
#include "gauntlet/generation.hpp"
#include "gauntlet/interaction.hpp"
#include "gauntlet/replay.hpp"
#include "gauntlet/time_util.hpp"
#include "gauntlet/tournament.hpp"

namespace gauntlet::testing {

inline std::chrono::system_clock::time_point fixture_epoch() {
  return std::chrono::system_clock::time_point(std::chrono::seconds(1767225600));
}

// Distinctive ids so that blinding scans cannot match by accident.
inline std::string fixture_template_id(int i) { return "tmplzq" + std::to_string(i) + "x"; }

inline std::string fixture_template_source(const std::string& id) {
  return "id: " + id + "\nname: Fixture " + id +
         "\n--- role: system\nWrite for {{textbook_title}}.\n"
         "--- role: user\n{{passage_text}}\n{{sert_question}}\n{{learner_response}}\n";
}

inline InteractionRecord fixture_interaction(int i) {
  InteractionRecord r;
  r.interaction_id = "int" + std::to_string(1000 + i);
  r.deployment = "fixture";
  r.textbook_title = "Fixture Book";
  r.textbook_description = "A book used by tests.";
  r.passage_text = "Passage number " + std::to_string(i) + ".";
  r.sert_question_type = static_cast<SertQuestionType>(i % 5);
  r.sert_question = "Question " + std::to_string(i) + "?";
  r.learner_response = "Response " + std::to_string(i) + ".";
  return r;
}

inline TournamentConfig fixture_config(int n_judges, SchedulerPolicy policy = {}) {
  TournamentConfig c;
  c.name = "fixture";
  c.policy = policy;
  for (int j = 1; j <= n_judges; ++j) {
    c.judges.push_back({"judge" + std::to_string(j), "Judge " + std::to_string(j)});
  }
  return c;
}

// In-memory tournament with every (template, interaction) candidate present.
inline std::unique_ptr<Tournament> make_tournament(int n_templates, int n_interactions,
                                                   const TournamentConfig& config) {
  auto t = std::make_unique<Tournament>(EventLog::in_memory(), stepping_clock(fixture_epoch()));
  t->ensure_config("fixture", config);
  std::vector<InteractionRecord> interactions;
  for (int i = 0; i < n_interactions; ++i) interactions.push_back(fixture_interaction(i));
  t->ingest(interactions);
  const chat::ChatRequest request{"fixture-model", {}, 0.0, 16, std::nullopt};
  for (int k = 0; k < n_templates; ++k) {
    const std::string id = fixture_template_id(k);
    t->register_template(fixture_template_source(id));
    for (const auto& interaction : interactions) {
      Candidate c;
      c.template_id = id;
      c.interaction_id = interaction.interaction_id;
      c.candidate_id = generation::candidate_id_for(id, interaction.interaction_id);
      c.text = "Follow-up " + c.candidate_id + " about " + interaction.interaction_id + "?";
      c.finish_reason = "stop";
      c.created_at = format_rfc3339(fixture_epoch());
      t->record_candidate(c, request);
    }
  }
  return t;
}

inline std::unique_ptr<Tournament> make_tournament(int n_templates, int n_interactions,
                                                   int n_judges = 2,
                                                   SchedulerPolicy policy = {}) {
  return make_tournament(n_templates, n_interactions, fixture_config(n_judges, policy));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gauntlet-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Canonical text of everything replay derives; equal digests mean equal states.
inline std::string state_digest(const TournamentState& s) {
  std::ostringstream out;
  char buf[64];
  const auto bits = [&](double d) {
    std::snprintf(buf, sizeof buf, "%a", d);
    return std::string(buf);
  };
  out << "created=" << s.created << " id=" << s.tournament_id << " seq=" << s.last_seq
      << " decisions=" << s.decision_seq << " issued=" << s.matchups_issued
      << " skips=" << s.skips << "\n";
  for (const auto& [id, t] : s.templates) out << "T " << id << " " << t.source.size() << "\n";
  for (const auto& id : s.interaction_order) out << "I " << id << "\n";
  for (const auto& [id, c] : s.candidates) out << "C " << id << " " << c.text << "\n";
  for (const auto& f : s.generation_failures) out << "F " << f.template_id << " " << f.interaction_id << "\n";
  for (const auto& [id, r] : s.ratings) {
    out << "R " << id << " " << bits(r.rating) << " " << bits(r.rd) << " " << bits(r.sigma) << "\n";
  }
  for (const auto& [id, n] : s.games) out << "G " << id << " " << n << "\n";
  for (const auto& [p, n] : s.pair_trials) out << "P " << p.first << "," << p.second << " " << n << "\n";
  for (const auto& [k, n] : s.pair_interaction_usage) {
    out << "U " << k.first.first << "," << k.first.second << "," << k.second << " " << n << "\n";
  }
  for (const auto& [id, m] : s.pending) out << "M " << id << " " << m.issued_to << "\n";
  for (const auto& [id, j] : s.resolved) out << "D " << id << " " << j << "\n";
  for (const auto& [j, h] : s.judge_history) out << "H " << j << " " << h.size() << "\n";
  for (const auto& [j, t] : s.judge_tallies) out << "J " << j << " " << t.decisions << " " << t.skips << "\n";
  return out.str();
}

// Runs `decisions` judgments (skips included) with a fixed synthetic preference.
inline void play(Tournament& t, int decisions, std::uint64_t seed = 1, double skip_rate = 0.1) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 1);
  const auto judges = t.read([](const TournamentState& s) { return s.config.judges; });
  std::size_t next = 0;
  for (int made = 0, guard = 0; made < decisions && guard < 100 * decisions + 100; ++guard) {
    const std::string judge = judges[next++ % judges.size()].judge_id;
    Matchup m;
    try {
      m = t.next_matchup(judge);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoEligibleMatchup) continue;
      throw;
    }
    const double r = u(gen);
    const Choice c = r < skip_rate ? Choice::kSkip
                     : (m.template_left < m.template_right) == (r < 0.7) ? Choice::kLeft
                                                                         : Choice::kRight;
    t.submit_decision(judge, m.matchup_id, c);
    ++made;
  }
}

}  // namespace gauntlet::testing
