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

#include "gauntlet/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <chrono>
#include <cmath>
#include <thread>

#include "gauntlet/codec.hpp"
#include "gauntlet/error.hpp"
#include "gauntlet/generation.hpp"
#include "gauntlet/report.hpp"
#include "gauntlet/scheduler.hpp"
#include "gauntlet/tournament.hpp"

namespace gauntlet::sim {
namespace {

constexpr std::chrono::sys_seconds kSimulationEpoch{std::chrono::seconds(1735689600)};

std::string template_id(int i) { return "t" + std::to_string(i); }

std::string interaction_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "i%04d", i);
  return buf;
}

std::string template_source(int i) {
  return "id: " + template_id(i) + "\nname: Synthetic template " + std::to_string(i) +
         "\ndescription: simulated competitor\n"
         "--- role: system\n"
         "You write one follow-up question for readers of {{textbook_title}}.\n"
         "--- role: user\n"
         "{{sert_question}}\n{{learner_response}}";
}

InteractionRecord synthetic_interaction(int i) {
  InteractionRecord r;
  r.interaction_id = interaction_id(i);
  r.deployment = "simulation";
  r.textbook_title = "Simulated Textbook";
  r.textbook_description = "A stand-in textbook for synthetic tournaments.";
  r.passage_text = "Passage " + std::to_string(i) + ".";
  r.sert_question_type = static_cast<SertQuestionType>(i % 5);
  r.sert_question = "Initial question " + std::to_string(i) + "?";
  r.learner_response = "Learner answer " + std::to_string(i) + ".";
  return r;
}

}  // namespace

void SyntheticJudgeModel::validate(std::size_t n_templates) const {
  if (true_strengths.size() != n_templates) {
    throw Error(ErrorCode::kConfig, "true_strengths needs one entry per template");
  }
  for (double s : true_strengths) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kConfig, "true strengths must be positive");
    }
  }
  if (!(lapse_rate >= 0.0 && lapse_rate < 1.0)) {
    throw Error(ErrorCode::kConfig, "lapse_rate must be in [0, 1)");
  }
  if (!(skip_rate >= 0.0 && skip_rate < 1.0)) {
    throw Error(ErrorCode::kConfig, "skip_rate must be in [0, 1)");
  }
}

Choice judge_choice(const SyntheticJudgeModel& model, double strength_left,
                    double strength_right, Rng& rng) {
  if (rng.uniform() < model.skip_rate) return Choice::kSkip;
  if (rng.uniform() < model.lapse_rate) return rng.coin() ? Choice::kLeft : Choice::kRight;
  const double p_left = strength_left / (strength_left + strength_right);
  return rng.uniform() < p_left ? Choice::kLeft : Choice::kRight;
}

void SimulationConfig::validate() const {
  if (n_templates < 2) throw Error(ErrorCode::kConfig, "n_templates must be >= 2");
  judge.validate(static_cast<std::size_t>(n_templates));
  policy.validate();
  rating.validate();
  if (n_decisions < 0) throw Error(ErrorCode::kConfig, "n_decisions must be >= 0");
  if (replications < 1) throw Error(ErrorCode::kConfig, "replications must be >= 1");
  if (n_interactions < 1) throw Error(ErrorCode::kConfig, "n_interactions must be >= 1");
  if (n_judges < 1) throw Error(ErrorCode::kConfig, "n_judges must be >= 1");
  if (threads < 0) throw Error(ErrorCode::kConfig, "threads must be >= 0");
}

SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "simulation config must be an object");
  SimulationConfig c;
  try {
    c.n_templates = j.value("n_templates", c.n_templates);
    c.n_decisions = j.value("n_decisions", c.n_decisions);
    c.replications = j.value("replications", c.replications);
    c.n_interactions = j.value("n_interactions", c.n_interactions);
    c.n_judges = j.value("n_judges", c.n_judges);
    c.threads = j.value("threads", c.threads);
    if (const auto it = j.find("judge_model"); it != j.end()) {
      c.judge.true_strengths = it->value("true_strengths", std::vector<double>{});
      c.judge.lapse_rate = it->value("lapse_rate", 0.0);
      c.judge.skip_rate = it->value("skip_rate", 0.0);
      c.judge.seed = it->value("seed", std::uint64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("simulation config: ") + e.what());
  }
  if (c.judge.true_strengths.empty()) {
    c.judge.true_strengths.assign(static_cast<std::size_t>(std::max(c.n_templates, 0)), 1.0);
  }
  if (j.contains("scheduler")) c.policy = scheduler_policy_from_json(j["scheduler"]);
  if (j.contains("rating")) c.rating = rating_config_from_json(j["rating"]);
  c.validate();
  return c;
}

nlohmann::json encode(const SimulationConfig& c) {
  return {{"n_templates", c.n_templates},
          {"judge_model",
           {{"true_strengths", c.judge.true_strengths},
            {"lapse_rate", c.judge.lapse_rate},
            {"skip_rate", c.judge.skip_rate},
            {"seed", c.judge.seed}}},
          {"scheduler", gauntlet::encode(c.policy)},
          {"rating", gauntlet::encode(c.rating)},
          {"n_decisions", c.n_decisions},
          {"replications", c.replications},
          {"n_interactions", c.n_interactions},
          {"n_judges", c.n_judges},
          {"threads", c.threads}};
}

ReplicationResult run_replication(const SimulationConfig& config, int replication,
                                  std::vector<Event>* events_out) {
  config.validate();
  const std::uint64_t rep = static_cast<std::uint64_t>(replication);
  ReplicationResult result;
  result.replication = replication;
  result.seed = mix_seed(config.judge.seed, rep);

  TournamentConfig tc;
  tc.name = "simulation";
  tc.rating = config.rating;
  tc.policy = config.policy;
  tc.policy.rng_seed = mix_seed(config.policy.rng_seed, rep);
  for (int j = 0; j < config.n_judges; ++j) {
    tc.judges.push_back({"j" + std::to_string(j + 1), "Synthetic judge " + std::to_string(j + 1)});
  }

  Tournament tournament = Tournament::in_memory(
      stepping_clock(std::chrono::system_clock::time_point(kSimulationEpoch)));
  tournament.ensure_config("sim-" + std::to_string(replication), tc);
  for (int t = 0; t < config.n_templates; ++t) tournament.register_template(template_source(t));
  std::vector<InteractionRecord> interactions;
  for (int i = 0; i < config.n_interactions; ++i) interactions.push_back(synthetic_interaction(i));
  tournament.ingest(interactions);

  const chat::ChatRequest request{"synthetic", {}, 0.0, 1, std::nullopt};
  for (int t = 0; t < config.n_templates; ++t) {
    for (const auto& interaction : interactions) {
      Candidate c;
      c.template_id = template_id(t);
      c.interaction_id = interaction.interaction_id;
      c.candidate_id = generation::candidate_id_for(c.template_id, c.interaction_id);
      c.text = "Follow-up question " + c.candidate_id + " for " + interaction.interaction_id + "?";
      c.finish_reason = "stop";
      c.created_at = format_rfc3339(std::chrono::system_clock::time_point(kSimulationEpoch));
      tournament.record_candidate(c, request);
    }
  }

  std::map<std::string, double, std::less<>> strength;
  for (int t = 0; t < config.n_templates; ++t) {
    strength[template_id(t)] = config.judge.true_strengths[static_cast<std::size_t>(t)];
  }

  Rng judge_rng(result.seed);
  const long max_steps = 100L * config.n_decisions + 1000L;
  std::size_t next_judge = 0;
  for (long step = 0; result.decisions < config.n_decisions && step < max_steps; ++step) {
    std::optional<Matchup> matchup;
    std::string judge_id;
    for (std::size_t tries = 0; tries < tc.judges.size() && !matchup; ++tries) {
      judge_id = tc.judges[next_judge].judge_id;
      next_judge = (next_judge + 1) % tc.judges.size();
      try {
        matchup = tournament.next_matchup(judge_id);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoEligibleMatchup) throw;
      }
    }
    if (!matchup) break;  // every judge has seen everything
    const Choice choice = judge_choice(config.judge, strength.at(matchup->template_left),
                                       strength.at(matchup->template_right), judge_rng);
    tournament.submit_decision(judge_id, matchup->matchup_id, choice);
    if (choice == Choice::kSkip) {
      ++result.skips;
    } else {
      ++result.decisions;
    }
  }

  const TournamentState state = tournament.snapshot();
  const auto standings = scheduler::standings(state);
  result.top_template = standings.front().template_id;
  const auto& truth = config.judge.true_strengths;
  const auto best = std::max_element(truth.begin(), truth.end()) - truth.begin();
  result.recovered = result.top_template == template_id(static_cast<int>(best));

  std::vector<double> ratings, strengths;
  for (int t = 0; t < config.n_templates; ++t) {
    ratings.push_back(state.ratings.at(template_id(t)).rating);
    strengths.push_back(truth[static_cast<std::size_t>(t)]);
  }
  result.kendall_tau = kendall_tau_b(ratings, strengths);

  if (events_out) *events_out = tournament.events();
  return result;
}

SimulationReport simulate(const SimulationConfig& config) {
  config.validate();
  SimulationReport report;
  report.replications = config.replications;
  report.decisions_per_replication = config.n_decisions;
  report.runs.resize(static_cast<std::size_t>(config.replications));

  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(config.replications));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int r = next++; r < config.replications; r = next++) {
      try {
        report.runs[static_cast<std::size_t>(r)] = run_replication(config, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  double tau_sum = 0.0;
  int recovered = 0;
  bool any_decisions = false;
  for (const auto& run : report.runs) {
    tau_sum += run.kendall_tau;
    recovered += run.recovered ? 1 : 0;
    any_decisions = any_decisions || run.decisions > 0;
  }
  report.kendall_tau_mean = tau_sum / config.replications;
  if (any_decisions) {
    report.top1_recovery_rate = static_cast<double>(recovered) / config.replications;
  }
  return report;
}

nlohmann::json report_json(const SimulationReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"replication", r.replication},
                    {"seed", r.seed},
                    {"decisions", r.decisions},
                    {"skips", r.skips},
                    {"top_template", r.top_template},
                    {"recovered", r.recovered},
                    {"kendall_tau", r.kendall_tau}});
  }
  return {{"replications", report.replications},
          {"top1_recovery_rate", report.top1_recovery_rate
                                     ? nlohmann::json(*report.top1_recovery_rate)
                                     : nlohmann::json(nullptr)},
          {"recovery_defined", report.top1_recovery_rate.has_value()},
          {"kendall_tau_mean", report.kendall_tau_mean},
          {"decisions_per_replication", report.decisions_per_replication},
          {"runs", std::move(runs)}};
}

std::string report_csv(const SimulationReport& report) {
  std::string out = "replication,seed,decisions,skips,top_template,recovered,kendall_tau\r\n";
  for (const auto& r : report.runs) {
    out += std::to_string(r.replication) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.decisions) + "," + std::to_string(r.skips) + "," +
           report::csv_field(r.top_template) + "," + (r.recovered ? "1" : "0") + "," +
           report::format_full(r.kendall_tau) + "\r\n";
  }
  return out;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "rank length mismatch");
  const auto sign = [](double d) { return (d > 0.0) - (d < 0.0); };
  long concordant_minus_discordant = 0;
  long pairs = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++pairs;
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      if (sx == 0) ++ties_x;
      if (sy == 0) ++ties_y;
      concordant_minus_discordant += sx * sy;
    }
  }
  const double denom = std::sqrt(static_cast<double>(pairs - ties_x) *
                                 static_cast<double>(pairs - ties_y));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(concordant_minus_discordant) / denom;
}

}  // namespace gauntlet::sim
