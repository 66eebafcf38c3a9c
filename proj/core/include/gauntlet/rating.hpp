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

// Glicko-2 rating arithmetic.
//
// Ratings live on two scales. The display scale is the familiar one centred
// at 1500; the internal scale divides by `scale_constant` (400 / ln 10) so
// that the expected score becomes a plain logistic of the rating gap:
//
//   mu   = (rating - base_rating) / scale_constant
//   phi  = rd / scale_constant
//   g(phi) = 1 / sqrt(1 + 3 phi^2 / pi^2)
//   E(mu, mu_j, phi_j) = 1 / (1 + exp(-g(phi_j) (mu - mu_j)))
//
// Everything here is a pure function over value types.

#include <functional>
#include <span>

namespace gauntlet::rating {

struct RatingConfig {
  double scale_constant = 173.7178;
  double base_rating = 1500.0;
  double base_rd = 350.0;
  double base_sigma = 0.06;
  double tau = 0.5;
  double convergence_tolerance = 1e-6;
  int max_iterations = 100;
  // When set, templates that sit out a decision get one inactivity step.
  bool inflate_inactive = false;

  void validate() const;
  bool operator==(const RatingConfig&) const = default;
};

struct RatingState {
  double rating = 1500.0;
  double rd = 350.0;
  double sigma = 0.06;

  bool operator==(const RatingState&) const = default;
};

RatingState initial_state(const RatingConfig& config);

struct InternalRating {
  double mu = 0.0;
  double phi = 0.0;
};

enum class Outcome { kLoss = 0, kWin = 1 };

struct GameResult {
  RatingState opponent;
  Outcome score = Outcome::kLoss;
};

InternalRating to_internal(double rating, double rd, const RatingConfig& config);
RatingState from_internal(InternalRating internal, double sigma,
                          const RatingConfig& config);

double g(double phi);
double expected_score(double mu, double mu_j, double phi_j);

// Inputs to the volatility root-find; `delta` is the estimated improvement and
// `v` the estimated variance of the rating from this period's games.
struct VolatilityProblem {
  double delta = 0.0;
  double phi = 0.0;
  double v = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double tolerance = 1e-6;
  int max_iterations = 100;
};

// The function whose root x* = ln(sigma'^2) defines the new volatility.
double volatility_objective(const VolatilityProblem& problem, double x);

// Called once per iteration with the current bracket lo < hi, where
// f(lo) > 0 > f(hi).
using BracketObserver =
    std::function<void(double lo, double hi, double f_lo, double f_hi)>;

// Illinois (modified regula falsi) iteration on volatility_objective.
// Throws Error(kNumericalFailure) when the iteration cap is hit.
double solve_volatility(const VolatilityProblem& problem,
                        const BracketObserver& observer = {});

// One rating period with at least one game. Throws on an empty game list.
RatingState update(const RatingState& player, std::span<const GameResult> games,
                   const RatingConfig& config);

// A rating period with no games: phi' = sqrt(phi^2 + sigma^2).
RatingState inactivity_step(const RatingState& player,
                            const RatingConfig& config = {});

// Probability that `a` is preferred over `b`, using the expected score with
// the two deviations combined: g(sqrt(phi_a^2 + phi_b^2)).
double win_probability(const RatingState& a, const RatingState& b,
                       const RatingConfig& config);

}  // namespace gauntlet::rating
