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

// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "gauntlet/judge_service.hpp"
#include "gauntlet/rating.hpp"
#include "gauntlet/replay.hpp"
#include "gauntlet/report.hpp"
#include "gauntlet/scheduler.hpp"
#include "gauntlet/simulator.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace gauntlet;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report_line(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void glicko_oracle() {
  const auto start = Clock::now();
  rating::RatingConfig c;
  c.tau = 0.5;
  const std::vector<rating::GameResult> games{{{1400, 30, 0.06}, rating::Outcome::kWin},
                                              {{1550, 100, 0.06}, rating::Outcome::kLoss},
                                              {{1700, 300, 0.06}, rating::Outcome::kLoss}};
  const rating::RatingState r = rating::update({1500, 200, 0.06}, games, c);
  const double elapsed = ms_since(start);
  constexpr double kSigmaOracle = 0.059995984400677836;
  const bool pass = std::abs(r.rating - 1464.06) <= 0.01 && std::abs(r.rd - 151.52) <= 0.01 &&
                    std::abs(r.sigma - kSigmaOracle) <= 1e-4;
  report_line("glicko2_worked_example", pass,
              fmt("rating %.4f rd %.4f sigma %.6f (%.3f ms)", r.rating, r.rd, r.sigma, elapsed));
}

void probability_laws() {
  const rating::RatingConfig c;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> rating(100, 3000), rd(0, 350);
  double worst = 0;
  bool equal_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const rating::RatingState a{rating(gen), rd(gen), 0.06}, b{rating(gen), rd(gen), 0.06};
    worst = std::max(worst, std::abs(rating::win_probability(a, b, c) +
                                     rating::win_probability(b, a, c) - 1.0));
    const rating::RatingState twin{a.rating, rd(gen), 0.06};
    equal_ok = equal_ok && rating::win_probability(a, twin, c) == 0.5;
  }
  const double gap = rating::win_probability({1900, 0, 0.06}, {1500, 0, 0.06}, c);
  report_line("probability_laws", worst <= 1e-12 && equal_ok && std::abs(gap - 0.9091) <= 1e-4,
              fmt("max |p(a,b)+p(b,a)-1| %.3g, equal ratings exact %s, 400-point gap %.6f",
                  worst, equal_ok ? "yes" : "no", gap));
}

sim::SimulationConfig recovery_config() {
  sim::SimulationConfig c;
  c.n_templates = 6;
  c.judge.true_strengths = {8, 4, 2, 1, 1, 1};
  c.judge.lapse_rate = 0.1;
  c.judge.seed = 42;
  c.policy.epsilon = 0.2;
  c.policy.rng_seed = 7;
  c.n_decisions = 213;
  c.replications = 100;
  c.n_interactions = 120;
  c.n_judges = 8;
  return c;
}

bool bitwise(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void replay_determinism() {
  testing::TempDir tmp;
  std::vector<Event> events;
  sim::run_replication(recovery_config(), 0, &events);
  const std::filesystem::path log = tmp.path() / "events.jsonl";
  {
    std::ofstream out(log, std::ios::binary);
    for (const auto& e : events) out << serialize_event(e) << "\n";
  }

  const auto start = Clock::now();
  const EventLog loaded = EventLog::open(log);
  const TournamentState a = replay(loaded.events());
  const TournamentState b = replay(loaded.events());
  const auto sa = scheduler::standings(a), sb = scheduler::standings(b);
  const auto ma = report::win_matrix(a), mb = report::win_matrix(b);
  bool same = sa.size() == sb.size() && ma.size() == mb.size() &&
              testing::state_digest(a) == testing::state_digest(b);
  for (std::size_t i = 0; same && i < sa.size(); ++i) {
    same = sa[i].template_id == sb[i].template_id && bitwise(sa[i].state.rating, sb[i].state.rating) &&
           bitwise(sa[i].state.rd, sb[i].state.rd) && bitwise(sa[i].state.sigma, sb[i].state.sigma);
  }
  for (std::size_t i = 0; same && i < ma.size(); ++i) {
    same = ma[i].template_a == mb[i].template_a && ma[i].template_b == mb[i].template_b &&
           ma[i].trials == mb[i].trials && bitwise(ma[i].prob_a_beats_b, mb[i].prob_a_beats_b);
  }
  std::ostringstream out, err;
  const int code = cli::run({"promptgauntlet", "verify-replay", "--dir", tmp.path().string()},
                            out, err);
  const double elapsed = ms_since(start);
  const std::int64_t preferences = a.decision_seq - a.skips;
  report_line("replay_determinism",
              same && code == 0 && preferences == 213 && elapsed < 1000.0,
              fmt("%lld preference decisions, bitwise identical %s, verify-replay exit %d "
                  "(%.1f ms)",
                  static_cast<long long>(preferences), same ? "yes" : "no", code, elapsed));
}

void dominance() {
  auto t = testing::make_tournament(2, 100, 2);
  const std::string a = testing::fixture_template_id(0);
  for (int i = 0; i < 100; ++i) {
    const std::string judge = i % 2 ? "judge2" : "judge1";
    const Matchup m = t->next_matchup(judge);
    t->submit_decision(judge, m.matchup_id,
                       m.template_left == a ? Choice::kLeft : Choice::kRight);
  }
  const auto rows = t->read([](const TournamentState& s) { return report::win_matrix(s); });
  double p = 0;
  std::int64_t trials = 0;
  if (rows.size() == 1) {
    p = rows[0].template_a == a ? rows[0].prob_a_beats_b : 1.0 - rows[0].prob_a_beats_b;
    trials = rows[0].trials;
  }
  report_line("dominance_convergence", rows.size() == 1 && trials == 100 && p >= 0.95,
              fmt("P(A>B) %.4f over %lld trials", p, static_cast<long long>(trials)));
}

void rank_recovery() {
  const auto start = Clock::now();
  const sim::SimulationReport r = sim::simulate(recovery_config());
  const double elapsed = ms_since(start) / 1000.0;
  const double rate = r.top1_recovery_rate.value_or(0.0);
  report_line("rank_recovery", r.top1_recovery_rate && rate >= 0.9 && elapsed < 30.0,
              fmt("top1_recovery_rate %.2f over %d replications, tau %.3f (%.1f s)", rate,
                  r.replications, r.kendall_tau_mean, elapsed));
}

// Top two by (rating desc, rd desc, id asc) among templates with candidates.
std::pair<std::string, std::string> independent_top_two(const TournamentState& s) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : s.templates) {
    const bool has = std::any_of(s.candidates.begin(), s.candidates.end(),
                                 [&](const auto& c) { return c.second.template_id == id; });
    if (has) ids.push_back(id);
  }
  const auto rating_of = [&](const std::string& id) {
    const auto it = s.ratings.find(id);
    return it == s.ratings.end() ? rating::initial_state(s.config.rating) : it->second;
  };
  std::sort(ids.begin(), ids.end(), [&](const std::string& x, const std::string& y) {
    const auto rx = rating_of(x), ry = rating_of(y);
    if (rx.rating != ry.rating) return rx.rating > ry.rating;
    if (rx.rd != ry.rd) return rx.rd > ry.rd;
    return x < y;
  });
  return {ids.at(0), ids.at(1)};
}

void scheduler_fidelity() {
  SchedulerPolicy policy;
  policy.epsilon = 0.0;
  policy.coverage_floor = 0;
  policy.rng_seed = 99;
  auto t = testing::make_tournament(6, 60, 2, policy);
  testing::play(*t, 50, 5, 0.1);
  const std::vector<Event> events = t->events();

  int issued = 0, violations = 0, decisions = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].type == EventType::kDecisionRecorded) ++decisions;
    if (events[i].type != EventType::kMatchupIssued) continue;
    const TournamentState before =
        replay(std::span<const Event>(events.data(), i));
    const TournamentState after =
        replay(std::span<const Event>(events.data(), i + 1));
    const Matchup* m = nullptr;
    for (const auto& [id, pending] : after.pending) {
      if (!before.pending.count(id)) m = &pending;
    }
    ++issued;
    const auto [x, y] = independent_top_two(before);
    if (m == nullptr || m->pair() != TemplatePair::of(x, y)) ++violations;
  }
  report_line("scheduler_fidelity", decisions == 50 && issued >= 50 && violations == 0,
              fmt("%d issued matchups over %d decisions, %d violations", issued, decisions,
                  violations));
}

void report_shape() {
  auto t = testing::make_tournament(6, 10, 2);
  testing::play(*t, 40, 3, 0.1);
  const TournamentState s = t->snapshot();
  const auto rows = report::win_matrix(s);
  const std::string md = report::render_markdown(s);
  std::string csv;
  for (const auto& f : report::export_report(s, report::ReportFormat::kCsv)) {
    if (f.filename == "matrix.csv") csv = f.content;
  }
  const bool headers = md.find("| Prompt A | Prompt B | Prob A > B | Trials |") != std::string::npos &&
                       csv.rfind("Prompt A,Prompt B,Prob A > B,Trials", 0) == 0;
  const std::vector<std::int64_t> counts{10, 20, 30};
  const report::CountSummary summary = report::summarize_counts(counts);
  const std::string mean = summary.mean ? report::format_fixed(*summary.mean, 2) : "-";
  const std::string sd = summary.sd ? report::format_fixed(*summary.sd, 2) : "-";
  report_line("report_shape", rows.size() == 15 && headers && mean == "20.00" && sd == "10.00",
              fmt("%zu matrix rows, headers %s, counts [10,20,30] mean %s SD %s", rows.size(),
                  headers ? "match" : "differ", mean.c_str(), sd.c_str()));
}

void blinding() {
  auto t = testing::make_tournament(6, 20, 3);
  service::ServiceOptions options;
  options.port = 0;
  service::JudgeService svc(*t, options);
  const int port = svc.start();
  httplib::Client client("127.0.0.1", port);

  std::vector<std::string> bodies;
  const auto keep = [&](const httplib::Result& res) {
    if (res) bodies.push_back(res->body);
    return static_cast<bool>(res);
  };
  const char* judges[] = {"judge1", "judge2", "judge3"};
  std::mt19937 gen(8);
  bool transport_ok = true;
  for (int round = 0; round < 30; ++round) {
    const std::string judge = judges[round % 3];
    auto res = client.Get("/api/next-pair?judge_id=" + judge);
    transport_ok = keep(res) && transport_ok;
    if (!res || res->status != 200) continue;
    const std::string matchup = json::parse(res->body)["matchup_id"];
    // Re-poll returns the same pending matchup.
    transport_ok = keep(client.Get("/api/next-pair?judge_id=" + judge)) && transport_ok;
    const char* choice = gen() % 5 == 0 ? "skip" : (gen() % 2 ? "left" : "right");
    const std::string body =
        json{{"judge_id", judge}, {"matchup_id", matchup}, {"choice", choice}}.dump();
    transport_ok = keep(client.Post("/api/decisions", body, "application/json")) && transport_ok;
    // Double submit.
    transport_ok = keep(client.Post("/api/decisions", body, "application/json")) && transport_ok;
    transport_ok = keep(client.Get("/api/progress")) && transport_ok;
  }
  keep(client.Get("/api/next-pair?judge_id=nobody"));
  keep(client.Post("/api/decisions", "{\"judge_id\":\"judge1\"}", "application/json"));
  keep(client.Get("/"));
  svc.stop();

  const auto ids = t->read([](const TournamentState& s) {
    std::vector<std::string> out;
    for (const auto& [id, _] : s.templates) out.push_back(id);
    return out;
  });
  int hits = 0;
  for (const auto& body : bodies) {
    for (const auto& id : ids) hits += body.find(id) != std::string::npos;
  }
  report_line("blinding", transport_ok && hits == 0 && bodies.size() > 100,
              fmt("%zu judge-facing responses scanned for %zu template ids, %d occurrences",
                  bodies.size(), ids.size(), hits));
}

}  // namespace

int main() {
  const auto run = [](void (*fn)(), const char* name) {
    try {
      fn();
    } catch (const std::exception& e) {
      report_line(name, false, std::string("exception: ") + e.what());
    }
  };
  run(glicko_oracle, "glicko2_worked_example");
  run(probability_laws, "probability_laws");
  run(replay_determinism, "replay_determinism");
  run(dominance, "dominance_convergence");
  run(rank_recovery, "rank_recovery");
  run(scheduler_fidelity, "scheduler_fidelity");
  run(report_shape, "report_shape");
  run(blinding, "blinding");
  std::printf("%s: %d failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
