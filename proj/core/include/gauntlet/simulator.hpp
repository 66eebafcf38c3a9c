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

// Synthetic-judge tournaments with known ground truth. Each replication runs
// the real scheduler, rating, and event-log code on an in-memory log.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gauntlet/event_log.hpp"
#include "gauntlet/rating.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tournament_state.hpp"

namespace gauntlet::sim {

// Per comparison: skip with probability skip_rate; otherwise, with
// probability lapse_rate, a fair coin; otherwise Bradley-Terry,
// P(left) = s_left / (s_left + s_right).
struct SyntheticJudgeModel {
  std::vector<double> true_strengths;
  double lapse_rate = 0.0;
  double skip_rate = 0.0;
  std::uint64_t seed = 0;

  void validate(std::size_t n_templates) const;
};

Choice judge_choice(const SyntheticJudgeModel& model, double strength_left,
                    double strength_right, Rng& rng);

struct SimulationConfig {
  int n_templates = 6;
  SyntheticJudgeModel judge;
  SchedulerPolicy policy;
  rating::RatingConfig rating;
  int n_decisions = 213;  // preference decisions (skips excluded)
  int replications = 100;
  int n_interactions = 120;
  int n_judges = 8;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

SimulationConfig simulation_config_from_json(const nlohmann::json& j);
nlohmann::json encode(const SimulationConfig& config);

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  int decisions = 0;
  int skips = 0;
  std::string top_template;
  bool recovered = false;
  double kendall_tau = 0.0;
  bool operator==(const ReplicationResult&) const = default;
};

struct SimulationReport {
  int replications = 0;
  // Unset when no decisions were made (recovery is undefined).
  std::optional<double> top1_recovery_rate;
  double kendall_tau_mean = 0.0;
  int decisions_per_replication = 0;
  std::vector<ReplicationResult> runs;
  bool operator==(const SimulationReport&) const = default;
};

// Template ids are "t0".."t{n-1}"; truth is config.judge.true_strengths.
// `events_out`, when given, receives the replication's full event log.
ReplicationResult run_replication(const SimulationConfig& config, int replication,
                                  std::vector<Event>* events_out = nullptr);

SimulationReport simulate(const SimulationConfig& config);

nlohmann::json report_json(const SimulationReport& report);
std::string report_csv(const SimulationReport& report);

// Kendall's tau-b; 0 when either ranking is entirely tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

}  // namespace gauntlet::sim
