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

#include "gauntlet/rating.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gauntlet/error.hpp"

namespace gauntlet::rating {
namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be finite");
  }
}

void require_finite_result(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNumericalFailure,
                std::string("non-finite ") + what +
                    " during rating update; inputs or config out of range");
  }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void RatingConfig::validate() const {
  require_finite(scale_constant, "scale_constant");
  require_finite(base_rating, "base_rating");
  if (!(scale_constant > 0.0)) {
    throw Error(ErrorCode::kConfig, "scale_constant must be > 0");
  }
  if (!(base_rd > 0.0) || !std::isfinite(base_rd)) {
    throw Error(ErrorCode::kConfig, "base_rd must be > 0");
  }
  if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) {
    throw Error(ErrorCode::kConfig, "base_sigma must be > 0");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kConfig, "tau must be > 0");
  }
  if (!(convergence_tolerance > 0.0)) {
    throw Error(ErrorCode::kConfig, "convergence_tolerance must be > 0");
  }
  if (max_iterations < 1) {
    throw Error(ErrorCode::kConfig, "max_iterations must be >= 1");
  }
}

RatingState initial_state(const RatingConfig& config) {
  return {config.base_rating, config.base_rd, config.base_sigma};
}

InternalRating to_internal(double rating, double rd, const RatingConfig& config) {
  require_finite(rating, "rating");
  require_finite(rd, "rd");
  if (!(rd > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rd must be > 0");
  }
  return {(rating - config.base_rating) / config.scale_constant,
          rd / config.scale_constant};
}

RatingState from_internal(InternalRating internal, double sigma,
                          const RatingConfig& config) {
  return {internal.mu * config.scale_constant + config.base_rating,
          internal.phi * config.scale_constant, sigma};
}

double g(double phi) {
  require_finite(phi, "phi");
  if (phi < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "phi must be >= 0");
  }
  constexpr double kPiSquared = std::numbers::pi * std::numbers::pi;
  return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / kPiSquared);
}

double expected_score(double mu, double mu_j, double phi_j) {
  require_finite(mu, "mu");
  require_finite(mu_j, "mu_j");
  return logistic(g(phi_j) * (mu - mu_j));
}

double volatility_objective(const VolatilityProblem& p, double x) {
  const double ex = std::exp(x);
  const double phi2 = p.phi * p.phi;
  const double denom = phi2 + p.v + ex;
  const double a = std::log(p.sigma * p.sigma);
  return ex * (p.delta * p.delta - phi2 - p.v - ex) / (2.0 * denom * denom) -
         (x - a) / (p.tau * p.tau);
}

double solve_volatility(const VolatilityProblem& p, const BracketObserver& observer) {
  if (!(p.v > 0.0) || !(p.phi >= 0.0) || !(p.sigma > 0.0) || !(p.tau > 0.0) ||
      !(p.tolerance > 0.0) || p.max_iterations < 1 || !std::isfinite(p.delta) ||
      !std::isfinite(p.v) || !std::isfinite(p.phi)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid volatility problem");
  }
  const auto f = [&p](double x) { return volatility_objective(p, x); };
  const double a = std::log(p.sigma * p.sigma);
  const double excess = p.delta * p.delta - p.phi * p.phi - p.v;

  double other;
  if (excess > 0.0) {
    other = std::log(excess);
  } else {
    int k = 1;
    while (f(a - k * p.tau) < 0.0) {
      if (++k > p.max_iterations) {
        throw Error(ErrorCode::kNumericalFailure,
                    "volatility bracket search exceeded the iteration cap");
      }
    }
    other = a - k * p.tau;
  }

  // f is strictly decreasing, so the root sits between the point where f > 0
  // (lo) and the point where f < 0 (hi).
  double lo = std::min(a, other);
  double hi = std::max(a, other);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (std::abs(f_lo) <= p.tolerance) return std::exp(lo / 2.0);
  if (std::abs(f_hi) <= p.tolerance) return std::exp(hi / 2.0);

  // Illinois weights: the retained endpoint's value is halved whenever the
  // same side is replaced twice in a row.
  double w_lo = f_lo;
  double w_hi = f_hi;
  int last_side = 0;
  for (int iter = 0; iter < p.max_iterations; ++iter) {
    if (observer) observer(lo, hi, f_lo, f_hi);
    const double c = hi - w_hi * (hi - lo) / (w_hi - w_lo);
    const double f_c = f(c);
    if (!std::isfinite(f_c)) break;
    if (std::abs(f_c) <= p.tolerance) return std::exp(c / 2.0);
    if (f_c > 0.0) {
      lo = c;
      f_lo = w_lo = f_c;
      if (last_side == -1) w_hi /= 2.0;
      last_side = -1;
    } else {
      hi = c;
      f_hi = w_hi = f_c;
      if (last_side == 1) w_lo /= 2.0;
      last_side = 1;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "volatility solver did not converge in " << p.max_iterations
      << " iterations (delta=" << p.delta << ", phi=" << p.phi << ", v=" << p.v
      << ", sigma=" << p.sigma << ", tau=" << p.tau << ")";
  throw Error(ErrorCode::kNumericalFailure, msg.str());
}

RatingState update(const RatingState& player, std::span<const GameResult> games,
                   const RatingConfig& config) {
  if (games.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "update needs at least one game; use inactivity_step instead");
  }
  const InternalRating self = to_internal(player.rating, player.rd, config);

  double inv_v = 0.0;
  double score_sum = 0.0;
  for (const GameResult& game : games) {
    const InternalRating opp = to_internal(game.opponent.rating, game.opponent.rd, config);
    const double g_j = g(opp.phi);
    const double e = expected_score(self.mu, opp.mu, opp.phi);
    const double s = game.score == Outcome::kWin ? 1.0 : 0.0;
    inv_v += g_j * g_j * e * (1.0 - e);
    score_sum += g_j * (s - e);
  }
  const double v = 1.0 / inv_v;
  require_finite_result(v, "variance");
  const double delta = v * score_sum;

  const VolatilityProblem problem{delta,
                                  self.phi,
                                  v,
                                  player.sigma,
                                  config.tau,
                                  config.convergence_tolerance,
                                  config.max_iterations};
  const double sigma_new = solve_volatility(problem);
  const double phi_star = std::sqrt(self.phi * self.phi + sigma_new * sigma_new);
  const double phi_new = 1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v);
  const double mu_new = self.mu + phi_new * phi_new * score_sum;
  require_finite_result(phi_new, "deviation");
  require_finite_result(mu_new, "rating");
  return from_internal({mu_new, phi_new}, sigma_new, config);
}

RatingState inactivity_step(const RatingState& player, const RatingConfig& config) {
  const double phi = player.rd / config.scale_constant;
  const double phi_new = std::sqrt(phi * phi + player.sigma * player.sigma);
  return {player.rating, phi_new * config.scale_constant, player.sigma};
}

double win_probability(const RatingState& a, const RatingState& b,
                       const RatingConfig& config) {
  const double mu_a = (a.rating - config.base_rating) / config.scale_constant;
  const double mu_b = (b.rating - config.base_rating) / config.scale_constant;
  const double phi_a = a.rd / config.scale_constant;
  const double phi_b = b.rd / config.scale_constant;
  return logistic(g(std::sqrt(phi_a * phi_a + phi_b * phi_b)) * (mu_a - mu_b));
}

}  // namespace gauntlet::rating
